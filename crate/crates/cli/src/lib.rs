//! The `kwb` command line: argument parsing, source selection and the checks behind each
//! subcommand.

mod report;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kwb_core::delooper::{
    bhs_check, bhs_complement, contracted_check, fundamental_sequence, kh_groups, negative_k, nil_decomposition_check, nk, twisted_bhs_check,
    BhsVerdict, DeloopError, EngineSource, Expression, KSource, ModelSource, Sign, SourceMode, StructuredKInstance, TwistedVerdict,
};
use kwb_core::kengine::Flavor;
use kwb_core::oracle::{self, OracleSource};
use kwb_core::rings::RingDesc;

pub use report::{Instance, Report, Section, Verdict};

/// Exit status for malformed arguments, unreadable or invalid input files.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kwb", version, about = "Exact checks of Bass delooping and the Bass-Heller-Swan splitting on K-groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Negative K-groups K_{-1}, ..., K_{-depth} by iterated Bass cokernels.
    Negk {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// NK^+_i and NK^-_i with their splittings.
    Nk {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        degree: i64,
    },
    /// The fundamental sequence and the splitting of K_i of the Laurent extension.
    BhsCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        degree: i64,
    },
    /// Retractions in every degree of the window and the splitting from degree 1 - c on.
    ContractCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        c: i64,
        #[arg(long, default_value = "0..1", allow_hyphen_values = true)]
        window: String,
    },
    /// Homotopy K-group KH_i as the colimit over polynomial extensions.
    Kh {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        degree: i64,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Every check over a window, for each base object.
    Report {
        #[command(flatten)]
        common: Common,
        /// Defaults to the oracle window, or 0..1 for rings.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        c: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FlavorArg {
    Free,
    IdempotentComplete,
}

#[derive(Debug, Args)]
pub struct Common {
    /// A ring such as Z, F9, Zmod6 or F3[t,t^-1].
    #[arg(long, conflicts_with = "oracle", required_unless_present = "oracle")]
    pub ring: Option<String>,
    /// An oracle JSON file; relative names are also looked up in the fixture directory.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Base object inside the oracle file.
    #[arg(long, requires = "oracle")]
    pub object: Option<String>,
    /// Automorphism label from the oracle file.
    #[arg(long)]
    pub twist: Option<String>,
    /// independent, bhs-extended or oracle; each command picks a default.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, value_enum, default_value_t = FlavorArg::IdempotentComplete)]
    pub flavor: FlavorArg,
    /// Load the oracle file without checking its identities.
    #[arg(long, requires = "oracle")]
    pub unvalidated: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

fn input(s: impl Into<String>) -> InputError {
    InputError(s.into())
}

/// `KWB_FIXTURES`, or the `fixtures` directory of the source tree.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os("KWB_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"))
}

fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let alt = fixture_dir().join(path);
    if alt.exists() {
        alt.canonicalize().unwrap_or(alt)
    } else {
        path.to_path_buf()
    }
}

pub fn parse_window(s: &str) -> Result<(i64, i64), InputError> {
    let bad = || input(format!("window {s:?} is not of the form lo..hi"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(input(format!("window {s:?} is empty")));
    }
    Ok((lo, hi))
}

/// Which checks need data beyond one adjoined variable, where the engine stops.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    OneVariable,
    Iterated,
}

struct Context {
    selector: String,
    flavor: Flavor,
    mode: Option<SourceMode>,
    engine: Arc<dyn KSource>,
    oracle: Option<Arc<OracleSource>>,
    validated: bool,
    objects: Vec<Expression>,
    twist: Option<String>,
}

impl Context {
    fn new(c: &Common) -> Result<Self, InputError> {
        let flavor = match c.flavor {
            FlavorArg::Free => Flavor::Free,
            FlavorArg::IdempotentComplete => Flavor::IdempotentComplete,
        };
        let mode = c
            .mode
            .as_deref()
            .map(|m| SourceMode::parse(m).ok_or_else(|| input(format!("unknown mode {m:?}; expected independent, bhs-extended or oracle"))))
            .transpose()?;
        let twist = c.twist.clone().filter(|t| t != "id");
        let engine: Arc<dyn KSource> = Arc::new(EngineSource::new(flavor));
        if let Some(r) = &c.ring {
            if twist.is_some() {
                return Err(input("--twist needs oracle data"));
            }
            if mode == Some(SourceMode::Oracle) {
                return Err(input("--mode oracle needs --oracle"));
            }
            let ring = RingDesc::parse(r).map_err(|e| input(format!("ring {r:?}: {e}")))?;
            let expr = Expression::from_ring(&ring).map_err(|e| input(format!("ring {r:?}: {e}")))?;
            return Ok(Context {
                selector: r.clone(),
                flavor,
                mode,
                engine,
                oracle: None,
                validated: true,
                objects: vec![expr],
                twist,
            });
        }
        let path = c.oracle.as_deref().expect("clap requires --ring or --oracle");
        if mode == Some(SourceMode::Independent) {
            return Err(input("--mode independent cannot read oracle files"));
        }
        let full = resolve(path);
        let src = if c.unvalidated { oracle::load_unvalidated(&full) } else { oracle::load(&full) }.map_err(|e| input(format!("{}: {e}", full.display())))?;
        let objects = match &c.object {
            Some(name) => vec![src.object(name).cloned().ok_or_else(|| input(format!("no object {name:?} in {}", path.display())))?],
            None => src.base_objects().into_iter().cloned().collect(),
        };
        if objects.is_empty() {
            return Err(input(format!("{} declares no base objects", path.display())));
        }
        if let Some(t) = &twist {
            if objects.iter().all(|o| !src.twists_over(o).contains(t)) {
                return Err(input(format!("no twist {t:?} in {}", path.display())));
            }
        }
        Ok(Context {
            selector: path.display().to_string(),
            flavor,
            mode,
            engine,
            oracle: Some(Arc::new(src)),
            validated: !c.unvalidated,
            objects,
            twist,
        })
    }

    fn single(&self) -> Result<&Expression, InputError> {
        match self.objects.as_slice() {
            [one] => Ok(one),
            many => {
                let names: Vec<String> = many.iter().map(|o| o.to_string()).collect();
                Err(input(format!("several base objects ({}); pick one with --object", names.join(", "))))
            }
        }
    }

    fn base_source(&self) -> Arc<dyn KSource> {
        match &self.oracle {
            Some(o) => o.clone(),
            None => self.engine.clone(),
        }
    }

    /// Rings default to the engine, and to its extension by the splitting where iterated
    /// extensions are needed; oracle files default to themselves.
    fn source(&self, need: Need) -> Arc<dyn KSource> {
        let extended = match self.mode {
            Some(SourceMode::BhsExtended) => true,
            Some(_) => false,
            None => self.oracle.is_none() && need == Need::Iterated,
        };
        if extended {
            Arc::new(ModelSource::bhs_extended(self.base_source()))
        } else {
            self.base_source()
        }
    }

    fn instances(&self, objects: &[Expression]) -> Vec<Instance> {
        objects
            .iter()
            .map(|o| Instance {
                selector: self.selector.clone(),
                object: o.to_string(),
                twist: self.twist.clone(),
                mode: self.mode.map_or("default", SourceMode::name).into(),
                flavor: match self.flavor {
                    Flavor::Free => "free",
                    Flavor::IdempotentComplete => "idempotent-complete",
                }
                .into(),
            })
            .collect()
    }

    fn instance(&self, src: &dyn KSource, base: &Expression, twist: Option<&str>, lo: i64, hi: i64) -> Result<StructuredKInstance, DeloopError> {
        if self.validated {
            StructuredKInstance::from_source(src, base, twist, lo, hi)
        } else {
            StructuredKInstance::new_unchecked(src, base, twist, lo, hi)
        }
    }
}

fn source_note(s: &mut Section, src: &dyn KSource) {
    let (mode, origin) = (src.mode(), src.origin());
    s.note(if mode == origin {
        format!("source: {}", mode.name())
    } else {
        format!("source: {} (data from {})", mode.name(), origin.name())
    });
}

fn on_error(s: Section, e: DeloopError) -> Section {
    if e.is_gap() {
        s.gap(e.to_string())
    } else {
        let mut s = s;
        s.fail(e.to_string());
        s
    }
}

fn negk_sections(src: Arc<dyn KSource>, base: &Expression, depth: usize) -> Vec<Section> {
    negative_k(src.clone(), base, depth)
        .into_iter()
        .map(|l| {
            let mut s = Section::new("negk", Some(l.degree));
            source_note(&mut s, src.as_ref());
            s.note(format!("reads degree-0 data of {} extensions of {base}", l.consumed.len()));
            match (l.group, l.gap) {
                (Some(g), _) => {
                    s.form(format!("K_{}({base})", l.degree), &g);
                    s
                }
                (None, gap) => s.gap(gap.unwrap_or_default()),
            }
        })
        .collect()
}

fn nk_section(ctx: &Context, src: &dyn KSource, base: &Expression, i: i64) -> Section {
    let mut s = Section::new("nk", Some(i));
    source_note(&mut s, src);
    let twist = ctx.twist.as_deref();
    let run = |s: &mut Section| -> Result<(), DeloopError> {
        let inst = ctx.instance(src, base, twist, i, i)?;
        let data = inst.at(i)?;
        s.group(format!("K_{i}({base})"), &data.k_a);
        for (sign, label) in [(Sign::Plus, "+"), (Sign::Minus, "-")] {
            let r = nk(&inst, i, sign)?;
            s.group(format!("NK^{label}_{i}({base})"), &r.group);
            s.witness(format!("NK^{label} inclusion"), &r.inclusion);
            s.witness(format!("NK^{label} retraction"), &r.retraction);
        }
        Ok(())
    };
    match run(&mut s) {
        Ok(()) => s,
        Err(e) => on_error(s, e),
    }
}

fn spot_name(n: u8) -> &'static str {
    match n {
        1 => "injectivity of (i+, -i-)",
        2 => "exactness at K_i(A[t]) + K_i(A[t^-1])",
        3 => "exactness at K_i(A[t,t^-1])",
        _ => "surjectivity of the boundary map",
    }
}

fn untwisted_bhs(ctx: &Context, src: &dyn KSource, base: &Expression, i: i64) -> Vec<Section> {
    let inst = match ctx.instance(src, base, None, i, i) {
        Ok(inst) => inst,
        Err(e) => {
            let mut s = Section::new("fundamental-sequence", Some(i));
            source_note(&mut s, src);
            return vec![on_error(s, e)];
        }
    };
    let mut fs_sec = Section::new("fundamental-sequence", Some(i));
    source_note(&mut fs_sec, src);
    match fundamental_sequence(&inst, i) {
        Ok(fs) => {
            let names = [
                format!("K_{i}({base})"),
                format!("K_{i}({base}[t]) + K_{i}({base}[t^-1])"),
                format!("K_{i}({base}[t,t^-1])"),
                format!("K_{}({base})", i - 1),
            ];
            for (n, g) in names.into_iter().zip(&fs.terms) {
                fs_sec.group(n, g);
            }
            fs_sec.witness("first", &fs.first);
            fs_sec.witness("second", &fs.second);
            fs_sec.witness("boundary", &fs.boundary);
            if let Some(sec) = &fs.section {
                fs_sec.witness("section", sec);
            }
            for sp in fs.spots.iter().filter(|sp| !sp.exact) {
                fs_sec.fail(format!("spot {}: {} fails{}", sp.spot, spot_name(sp.spot), sp.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()));
            }
            if let Some(first) = fs.first_failure() {
                fs_sec.note(format!("first failing spot: {first}"));
            } else if fs.section.is_none() {
                fs_sec.fail("the boundary map has no section");
            }
        }
        Err(e) => fs_sec = on_error(fs_sec, e),
    }
    let mut b = Section::new("bhs", Some(i));
    source_note(&mut b, src);
    match bhs_check(&inst, i) {
        Ok(r) => {
            b.group(format!("K_{}({base})", i - 1), &r.k_below);
            b.group(format!("K_{i}({base})"), &r.k);
            b.group(format!("NK^+_{i}({base})"), &r.nk_plus);
            b.group(format!("NK^-_{i}({base})"), &r.nk_minus);
            b.group(format!("K_{i}({base}[t,t^-1])"), &r.k_laurent);
            if let Ok(c) = bhs_complement(&inst, i) {
                b.group(format!("K_{i}({base}[t,t^-1]) / (K_{i} + NK^+_{i} + NK^-_{i})"), &c);
            }
            if let Some(m) = &r.map {
                b.witness("splitting", m);
                if let (BhsVerdict::Iso, Some(inv)) = (&r.verdict, m.has_retraction()) {
                    b.witness("splitting inverse", &inv);
                }
            }
            match r.verdict {
                BhsVerdict::Iso => {}
                BhsVerdict::NotIso { kernel, cokernel } => b.fail(format!("splitting map has kernel {kernel} and cokernel {cokernel}")),
                BhsVerdict::SplittingMissing => b.fail("no section of the boundary map"),
            }
        }
        Err(e) => b = on_error(b, e),
    }
    vec![fs_sec, b]
}

fn twisted_verdict(s: &mut Section, v: TwistedVerdict) {
    match v {
        TwistedVerdict::Pass => {}
        TwistedVerdict::ConsistentUpToExtension => s.note("consistent up to an unresolved extension"),
        TwistedVerdict::Fail { reason } => s.fail(reason),
        TwistedVerdict::Gap { reason } => {
            let taken = std::mem::replace(s, Section::new("", None));
            *s = taken.gap(reason);
        }
    }
}

fn twisted_bhs(src: &dyn KSource, base: &Expression, twist: &str, i: i64) -> Section {
    let mut s = Section::new("twisted-bhs", Some(i));
    source_note(&mut s, src);
    let r = twisted_bhs_check(src, base, Some(twist), i);
    let forms = [
        (format!("coker(1 - {twist}) on K_{i}({base})"), r.torus_coker),
        (format!("ker(1 - {twist}) on K_{}({base})", i - 1), r.torus_ker),
        (format!("NK^+_{i}({base}_{twist})"), r.nk_plus),
        (format!("NK^-_{i}({base}_{twist})"), r.nk_minus),
        (format!("K_{i}({base}_{twist}[t,t^-1])"), r.k_laurent),
    ];
    for (name, f) in forms {
        if let Some(f) = f {
            s.form(name, &f);
        }
    }
    twisted_verdict(&mut s, r.verdict);
    s
}

fn bhs_sections(ctx: &Context, src: &dyn KSource, base: &Expression, i: i64) -> Vec<Section> {
    match ctx.twist.as_deref() {
        Some(t) => vec![twisted_bhs(src, base, t, i)],
        None => untwisted_bhs(ctx, src, base, i),
    }
}

fn contract_sections(ctx: &Context, src: &dyn KSource, base: &Expression, lo: i64, hi: i64, c: i64) -> Vec<Section> {
    let inst = match ctx.instance(src, base, ctx.twist.as_deref(), lo, hi) {
        Ok(inst) => inst,
        Err(e) => {
            let mut s = Section::new("contracted", None);
            source_note(&mut s, src);
            return vec![on_error(s, e)];
        }
    };
    let r = contracted_check(&inst, c);
    r.degrees
        .into_iter()
        .map(|d| {
            let mut s = Section::new("contracted", Some(d.degree));
            source_note(&mut s, src);
            s.note(format!("c = {c}"));
            if let Some(gap) = d.gap {
                return s.gap(gap);
            }
            if d.retraction {
                s.note(if d.retraction_declared { "declared retraction verified" } else { "retraction found" });
            } else {
                s.fail(if d.retraction_declared { "declared retraction is not a left inverse" } else { "no retraction exists" });
            }
            match d.bhs {
                Some(BhsVerdict::Iso) => s.note("splitting is an isomorphism"),
                Some(BhsVerdict::NotIso { kernel, cokernel }) => s.fail(format!("splitting map has kernel {kernel} and cokernel {cokernel}")),
                Some(BhsVerdict::SplittingMissing) => s.fail("no section of the boundary map"),
                None => s.note("splitting not required in this degree"),
            }
            s
        })
        .collect()
}

fn kh_section(src: &dyn KSource, base: &Expression, i: i64, bound: usize) -> Section {
    let mut s = Section::new("kh", Some(i));
    source_note(&mut s, src);
    let r = kh_groups(src, base, i, bound);
    for (n, g) in r.chain.iter().enumerate() {
        s.form(format!("K_{i}(stage {n})"), g);
    }
    if let Some(v) = &r.value {
        s.form(format!("KH_{i}({base})"), v);
    }
    if let Some(n) = r.stable_at {
        s.note(format!("stable at n = {n}"));
    }
    let passed = r.passed();
    let ev0 = r.ev0_inverse;
    let nk0 = r.nk_vanishes;
    for g in r.gaps {
        s = s.gap(g);
    }
    if !passed && s.verdict == Verdict::Pass {
        if r.value.is_none() {
            s.fail(format!("no stabilization within {bound} steps"));
        }
        if ev0 == Some(false) {
            s.fail("ev0 and i+ are not inverse at the stable stage");
        }
        if nk0 == Some(false) {
            s.fail("NK does not vanish at the stable stage");
        }
    }
    s
}

fn nil_section(ctx: &Context, src: &dyn KSource, base: &Expression, i: i64) -> Section {
    let mut s = Section::new("nil", Some(i));
    source_note(&mut s, src);
    let r = nil_decomposition_check(src, base, ctx.twist.as_deref(), i);
    let twist = ctx.twist.as_deref().unwrap_or("id");
    let forms = [
        (format!("K_{i}(Nil({base}, {twist}))"), r.k_nil),
        (format!("K_{i}({base})"), r.k),
        (format!("NK_{}({base})", i + 1), r.nk_shift),
    ];
    for (name, f) in forms {
        if let Some(f) = f {
            s.form(name, &f);
        }
    }
    twisted_verdict(&mut s, r.verdict);
    s
}

fn run_command(cmd: &Command) -> Result<(Report, Format), InputError> {
    let (name, common) = match cmd {
        Command::Negk { common, .. } => ("negk", common),
        Command::Nk { common, .. } => ("nk", common),
        Command::BhsCheck { common, .. } => ("bhs-check", common),
        Command::ContractCheck { common, .. } => ("contract-check", common),
        Command::Kh { common, .. } => ("kh", common),
        Command::Report { common, .. } => ("report", common),
    };
    let ctx = Context::new(common)?;
    let one = |need: Need| -> Result<(Arc<dyn KSource>, Expression), InputError> { Ok((ctx.source(need), ctx.single()?.clone())) };
    let (objects, sections) = match cmd {
        Command::Negk { depth, .. } => {
            let (src, base) = one(Need::Iterated)?;
            (vec![base.clone()], negk_sections(src, &base, *depth))
        }
        Command::Nk { degree, .. } => {
            let (src, base) = one(Need::OneVariable)?;
            (vec![base.clone()], vec![nk_section(&ctx, src.as_ref(), &base, *degree)])
        }
        Command::BhsCheck { degree, .. } => {
            let (src, base) = one(Need::OneVariable)?;
            (vec![base.clone()], bhs_sections(&ctx, src.as_ref(), &base, *degree))
        }
        Command::ContractCheck { c, window, .. } => {
            let (lo, hi) = parse_window(window)?;
            let (src, base) = one(Need::OneVariable)?;
            (vec![base.clone()], contract_sections(&ctx, src.as_ref(), &base, lo, hi, *c))
        }
        Command::Kh { degree, bound, .. } => {
            let (src, base) = one(Need::Iterated)?;
            (vec![base.clone()], vec![kh_section(src.as_ref(), &base, *degree, *bound)])
        }
        Command::Report { window, depth, bound, c, .. } => {
            let (lo, hi) = match (window, &ctx.oracle) {
                (Some(w), _) => parse_window(w)?,
                (None, Some(o)) => o.window(),
                (None, None) => (0, 1),
            };
            let objects: Vec<Expression> = ctx.objects.clone();
            let mut sections = Vec::new();
            let flat = ctx.source(Need::OneVariable);
            let iterated = ctx.source(Need::Iterated);
            for base in &objects {
                if ctx.twist.is_none() {
                    sections.extend(negk_sections(iterated.clone(), base, *depth));
                }
                for i in lo..=hi {
                    sections.push(nk_section(&ctx, flat.as_ref(), base, i));
                    sections.extend(bhs_sections(&ctx, flat.as_ref(), base, i));
                }
                sections.extend(contract_sections(&ctx, flat.as_ref(), base, lo, hi, *c));
                if ctx.twist.is_none() {
                    for i in lo..=hi {
                        sections.push(kh_section(iterated.as_ref(), base, i, *bound));
                    }
                }
                for i in lo..=hi {
                    if flat.nil(base, ctx.twist.as_deref(), i).is_ok() {
                        sections.push(nil_section(&ctx, flat.as_ref(), base, i));
                    }
                }
            }
            (objects, sections)
        }
    };
    Ok((Report::new(name, ctx.instances(&objects), sections), common.format))
}

/// Runs one invocation and returns the text to print and the exit status.
pub fn run(cli: &Cli) -> (String, i32) {
    match run_command(&cli.command) {
        Ok((report, Format::Json)) => (report.to_json(), report.verdict.exit_code()),
        Ok((report, Format::Text)) => (report.to_text(), report.verdict.exit_code()),
        Err(e) => (format!("error: {e}\n"), EXIT_INPUT),
    }
}
