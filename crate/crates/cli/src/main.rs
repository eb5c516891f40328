//! Command-line front end: homology tables, cobordism maps, closed-surface
//! values, difference classes, braid classes, the s-invariant, torsion
//! profiles, the formal R1 certificate, and ribbon doubling checks.
//!
//! Reports are deterministic: identical inputs and flags produce
//! byte-identical output, and every report embeds the input hash and the
//! engine version.

use std::fmt::Write as _;
use std::process::ExitCode;

use khc_core::algebra::{theory_from_flag, AnyTheory, Theory};
use khc_core::complex::{
    dual_homology, Chain, Gen, GradedComplex, HomologyModule, DEFAULT_BUDGET,
};
use khc_core::diagram::LinkDiagram;
use khc_core::formal::{bracket, deloop, gauss_reduce, tqft_homology, verify_r1_proof};
use khc_core::invariants::{
    bn_generators, plamenevskaya, ribbon_double_check, s_invariant, theta_classes, torsion_profile,
};
use khc_core::movie::{
    closed_surface_value, difference_class, movie_map, parse_movie_with, Movie, MovieOptions,
};
use khc_core::ring::{EucRing, F2Poly, Int, F2};

const VERSION: &str = env!("CARGO_PKG_VERSION");

struct Config {
    theory: String,
    budget: u128,
    allow_r3: bool,
    class_file: Option<String>,
    out: Option<String>,
    format: String,
    inputs: Vec<String>,
}

fn usage() -> String {
    "usage: khc <command> [flags] <inputs>\n\
     commands:\n\
       homology <file.pd|file.braid>     bigraded homology table\n\
       jones <file.pd|file.braid>        Kauffman state-sum Jones polynomial\n\
       map <file.movie>                  movie chain map evaluation\n\
       closed <file.movie>               scalar of a closed-surface movie\n\
       diff <m1.movie> <m2.movie>        difference class of two movies\n\
       psi <file.braid>                  transverse braid class certificate\n\
       s <file.pd|file.braid>            Bar-Natan s-invariant\n\
       profile <file.pd|file.braid>      H-torsion page profile\n\
       verify-formal                     dotted-category R1 certificate\n\
       ribbon-check <file.movie>         ribbon doubling injectivity check\n\
       dual <file.pd|file.braid>         homology of the dual complex\n\
       reduce <file.pd|file.braid>       deloop + gaussian reduction pipeline\n\
       bn-generators <file.pd|...>       Lee-type generator certificates\n\
     flags:\n\
       --theory kh-z|kh-f2|bn-f2h   coefficient theory (default kh-z)\n\
       --budget <n>                 generator budget (default 2^26)\n\
       --no-r3 | --allow-r3         reject or attempt R3 moves (default reject)\n\
       --class <file.json>          chain element input for map\n\
       --out <file>                 write the report to a file\n\
       --format json|text           report format (default text)\n"
        .to_string()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(report) => {
            print!("{}", report);
            ExitCode::SUCCESS
        }
        Err(AppError::Refused(msg)) => {
            eprintln!("refused: {}", msg);
            ExitCode::from(1)
        }
        Err(AppError::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

enum AppError {
    /// computation refused (budget); exit 1
    Refused(String),
    /// bad input; exit 2
    Input(String),
}

fn input_err<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Input(e.to_string())
}

fn run(args: &[String]) -> Result<String, AppError> {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        return Err(AppError::Input(usage()));
    }
    let command = args[0].clone();
    let mut cfg = Config {
        theory: "kh-z".into(),
        budget: DEFAULT_BUDGET,
        allow_r3: false,
        class_file: None,
        out: None,
        format: "text".into(),
        inputs: Vec::new(),
    };
    let mut it = args[1..].iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--theory" => {
                cfg.theory = it.next().ok_or(AppError::Input("--theory needs a value".into()))?.clone()
            }
            "--budget" => {
                cfg.budget = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or(AppError::Input("--budget needs an integer".into()))?
            }
            "--no-r3" => cfg.allow_r3 = false,
            "--allow-r3" => cfg.allow_r3 = true,
            "--class" => {
                cfg.class_file =
                    Some(it.next().ok_or(AppError::Input("--class needs a file".into()))?.clone())
            }
            "--out" => cfg.out = Some(it.next().ok_or(AppError::Input("--out needs a file".into()))?.clone()),
            "--format" => {
                cfg.format = it.next().ok_or(AppError::Input("--format needs a value".into()))?.clone()
            }
            other if other.starts_with("--") => {
                return Err(AppError::Input(format!("unknown flag {}", other)))
            }
            other => cfg.inputs.push(other.to_string()),
        }
    }
    if cfg.format != "text" && cfg.format != "json" {
        return Err(AppError::Input("format must be text or json".into()));
    }

    let report = dispatch(&command, &cfg)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, &report).map_err(input_err)?;
        Ok(String::new())
    } else {
        Ok(report)
    }
}

/// FNV-1a hash of the input files, recorded for reproducibility.
fn input_hash(data: &[Vec<u8>]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for chunk in data {
        for b in chunk {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{:016x}", h)
}

fn read_file(path: &str) -> Result<Vec<u8>, AppError> {
    std::fs::read(path).map_err(|e| AppError::Input(format!("{}: {}", path, e)))
}

fn load_diagram(path: &str) -> Result<(LinkDiagram, Vec<u8>), AppError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes).to_string();
    let first = text.lines().map(|l| l.trim()).find(|l| !l.is_empty() && !l.starts_with('#'));
    let d = if first.map_or(false, |l| l.starts_with("braid")) {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let strands: usize = toks
            .get(1)
            .and_then(|t| t.parse().ok())
            .ok_or(AppError::Input("braid header wants: braid <strands> <letters...>".into()))?;
        let word: Result<Vec<i32>, _> = toks[2..].iter().map(|t| t.parse()).collect();
        LinkDiagram::from_braid(&word.map_err(|_| AppError::Input("bad braid letter".into()))?, strands)
            .map_err(input_err)?
    } else {
        LinkDiagram::parse_pd(&text).map_err(input_err)?
    };
    Ok((d, bytes))
}

fn load_movie(path: &str, allow_r3: bool) -> Result<(Movie, Vec<u8>), AppError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes).to_string();
    let m = parse_movie_with(&text, allow_r3).map_err(input_err)?;
    Ok((m, bytes))
}

/// Chain element files: a JSON list of [vertex word, label word, coeff]
/// triples, e.g. [["111000000", "xxxx", 1]]. Coefficients are integers or
/// H-power strings like "H" / "H^2".
fn parse_class_terms(text: &str) -> Result<Vec<(String, String, String)>, AppError> {
    let mut terms = Vec::new();
    let mut chars = text.chars().peekable();
    fn skip_ws(it: &mut std::iter::Peekable<std::str::Chars>) {
        while it.peek().map_or(false, |c| c.is_whitespace() || *c == ',') {
            it.next();
        }
    }
    fn token(it: &mut std::iter::Peekable<std::str::Chars>) -> Result<String, AppError> {
        skip_ws(it);
        let mut out = String::new();
        match it.peek() {
            Some('"') => {
                it.next();
                for c in it.by_ref() {
                    if c == '"' {
                        return Ok(out);
                    }
                    out.push(c);
                }
                Err(AppError::Input("unterminated string in class file".into()))
            }
            _ => {
                while it.peek().map_or(false, |c| !c.is_whitespace() && !"[],".contains(*c)) {
                    out.push(it.next().unwrap());
                }
                Ok(out)
            }
        }
    }
    skip_ws(&mut chars);
    if chars.next() != Some('[') {
        return Err(AppError::Input("class file must be a JSON list".into()));
    }
    loop {
        skip_ws(&mut chars);
        match chars.peek() {
            Some(']') => break,
            Some('[') => {
                chars.next();
                let v = token(&mut chars)?;
                let l = token(&mut chars)?;
                let c = token(&mut chars)?;
                skip_ws(&mut chars);
                if chars.next() != Some(']') {
                    return Err(AppError::Input("class term must have three entries".into()));
                }
                terms.push((v, l, c));
            }
            _ => return Err(AppError::Input("malformed class file".into())),
        }
    }
    Ok(terms)
}

fn class_chain<R: EucRing>(
    terms: &[(String, String, String)],
    cx: &GradedComplex<R>,
) -> Result<Chain<R>, AppError> {
    let n = cx.diagram.n();
    let mut chain = Chain::zero();
    for (vw, lw, cw) in terms {
        if vw.len() != n {
            return Err(AppError::Input(format!("vertex word {} wants {} bits", vw, n)));
        }
        let mut vertex = 0u32;
        for (i, c) in vw.chars().enumerate() {
            match c {
                '1' => vertex |= 1 << i,
                '0' => {}
                _ => return Err(AppError::Input(format!("bad vertex word {}", vw))),
            }
        }
        let circles = cx.circle_map(vertex).count;
        if lw.len() != circles {
            return Err(AppError::Input(format!(
                "label word {} wants {} labels at vertex {}",
                lw, circles, vw
            )));
        }
        let mut labels = 0u32;
        for (i, c) in lw.chars().enumerate() {
            match c {
                'x' | 'X' => labels |= 1 << i,
                '1' => {}
                _ => return Err(AppError::Input(format!("bad label word {}", lw))),
            }
        }
        let coeff = parse_coeff::<R>(cw)?;
        chain.add_term(Gen { vertex, labels }, coeff);
    }
    Ok(chain)
}

fn parse_coeff<R: EucRing>(s: &str) -> Result<R, AppError> {
    if let Ok(n) = s.parse::<i64>() {
        return Ok(R::from_i64(n));
    }
    let hpow = if s == "H" { Some(1) } else { s.strip_prefix("H^").and_then(|t| t.parse::<usize>().ok()) };
    if let Some(k) = hpow {
        let any: &dyn std::any::Any = &F2Poly::h_pow(k);
        return match any.downcast_ref::<R>() {
            Some(h) => Ok(h.clone()),
            None => Err(AppError::Input(format!("coefficient {} needs the bn-f2h theory", s))),
        };
    }
    Err(AppError::Input(format!("bad coefficient {:?}", s)))
}

// ------------------------------------------------------------- reports

struct Report {
    command: String,
    theory: Option<String>,
    hash: String,
    fields: Vec<(String, String)>,
    table: Option<HomologyModule>,
}

impl Report {
    fn new(command: &str, theory: Option<&str>, hash: String) -> Self {
        Report {
            command: command.into(),
            theory: theory.map(|s| s.into()),
            hash,
            fields: Vec::new(),
            table: None,
        }
    }
    fn field(&mut self, k: &str, v: impl std::fmt::Display) {
        self.fields.push((k.to_string(), v.to_string()));
    }
    fn render(&self, format: &str) -> String {
        let mut out = String::new();
        if format == "json" {
            let _ = write!(
                out,
                "{{\"engine\":\"khc {}\",\"command\":{:?},\"input_hash\":{:?}",
                VERSION, self.command, self.hash
            );
            if let Some(t) = &self.theory {
                let _ = write!(out, ",\"theory\":{:?}", t);
            }
            for (k, v) in &self.fields {
                if v.starts_with('[') {
                    let _ = write!(out, ",{:?}:{}", k, v);
                } else {
                    let _ = write!(out, ",{:?}:{:?}", k, v);
                }
            }
            if let Some(m) = &self.table {
                let _ = write!(out, ",\"bigraded\":[");
                let mut first = true;
                for ((h, q), e) in &m.entries {
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    let tors: Vec<String> = e.torsion.iter().map(|t| t.to_string()).collect();
                    let _ = write!(
                        out,
                        "{{\"h\":{},\"q\":{},\"free\":{},\"torsion\":[{}]}}",
                        h,
                        q,
                        e.free,
                        tors.join(",")
                    );
                }
                out.push(']');
            }
            out.push_str("}\n");
        } else {
            let _ = writeln!(out, "khc {} :: {} (input {})", VERSION, self.command, self.hash);
            if let Some(t) = &self.theory {
                let _ = writeln!(out, "theory: {}", t);
            }
            for (k, v) in &self.fields {
                let _ = writeln!(out, "{}: {}", k, v);
            }
            if let Some(m) = &self.table {
                out.push_str(&m.to_string());
            }
        }
        out
    }
}

fn with_theory<T>(
    flag: &str,
    f_int: impl FnOnce(Theory<Int>) -> Result<T, AppError>,
    f_f2: impl FnOnce(Theory<F2>) -> Result<T, AppError>,
    f_f2h: impl FnOnce(Theory<F2Poly>) -> Result<T, AppError>,
) -> Result<T, AppError> {
    match theory_from_flag(flag).map_err(AppError::Input)? {
        AnyTheory::KhZ(t) => f_int(t),
        AnyTheory::KhF2(t) => f_f2(t),
        AnyTheory::BnF2H(t) => f_f2h(t),
    }
}

fn complex_err(e: khc_core::complex::ComplexError) -> AppError {
    match e {
        khc_core::complex::ComplexError::Budget { .. } => AppError::Refused(e.to_string()),
        other => AppError::Input(other.to_string()),
    }
}

fn movie_err(e: khc_core::movie::MovieError) -> AppError {
    match e {
        khc_core::movie::MovieError::Complex(khc_core::complex::ComplexError::Budget { .. }) => {
            AppError::Refused(e.to_string())
        }
        other => AppError::Input(other.to_string()),
    }
}

fn dispatch(command: &str, cfg: &Config) -> Result<String, AppError> {
    let need = |n: usize| -> Result<(), AppError> {
        if cfg.inputs.len() != n {
            Err(AppError::Input(format!("{} wants {} input file(s)\n{}", command, n, usage())))
        } else {
            Ok(())
        }
    };
    match command {
        "homology" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            let hash = input_hash(&[bytes]);
            fn go<R: EucRing>(d: &LinkDiagram, t: Theory<R>, budget: u128) -> Result<HomologyModule, AppError> {
                let cx = GradedComplex::build(d.clone(), t, budget).map_err(complex_err)?;
                Ok(cx.homology().module())
            }
            let module = with_theory(
                &cfg.theory,
                |t| go(&d, t, cfg.budget),
                |t| go(&d, t, cfg.budget),
                |t| go(&d, t, cfg.budget),
            )?;
            let mut r = Report::new(command, Some(&cfg.theory), hash);
            r.field("crossings", d.n());
            r.field("components", d.components.len());
            r.table = Some(module);
            Ok(r.render(&cfg.format))
        }
        "jones" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            let mut r = Report::new(command, None, input_hash(&[bytes]));
            r.field("jones", d.kauffman_jones());
            Ok(r.render(&cfg.format))
        }
        "map" => {
            need(1)?;
            let (m, bytes) = load_movie(&cfg.inputs[0], cfg.allow_r3)?;
            let mut data = vec![bytes];
            let class_terms = match &cfg.class_file {
                Some(p) => {
                    let b = read_file(p)?;
                    let t = parse_class_terms(&String::from_utf8_lossy(&b))?;
                    data.push(b);
                    Some(t)
                }
                None => None,
            };
            let hash = input_hash(&data);
            let opts = MovieOptions { budget: cfg.budget, verify_steps: false };
            fn go<R: EucRing>(
                m: &Movie,
                t: Theory<R>,
                opts: MovieOptions,
                class: Option<&[(String, String, String)]>,
            ) -> Result<Vec<(String, String)>, AppError> {
                let f = movie_map(m, &t, opts).map_err(movie_err)?;
                let mut fields =
                    vec![("chi".to_string(), f.chi.to_string()), ("q_degree".to_string(), f.chi.to_string())];
                let z = match class {
                    Some(terms) => class_chain(terms, &f.source)?,
                    None => {
                        if f.source.diagram.n() == 0 && f.source.diagram.free_loops.is_empty() {
                            Chain::gen(Gen { vertex: 0, labels: 0 })
                        } else {
                            return Err(AppError::Input(
                                "map from a nonempty source needs --class <file>".into(),
                            ));
                        }
                    }
                };
                let img = f.apply(&z);
                fields.push(("image_terms".to_string(), img.0.len().to_string()));
                if f.target.diagram.n() == 0 && f.target.diagram.free_loops.is_empty() {
                    let scalar = img.0.get(&Gen { vertex: 0, labels: 0 }).cloned().unwrap_or_else(R::zero);
                    fields.push(("scalar".to_string(), scalar.to_string()));
                } else {
                    let hom = f.target.homology();
                    let zero = hom.is_zero_class(&f.target, &img);
                    fields.push((
                        "image_class".to_string(),
                        match zero {
                            Some(true) => "zero".into(),
                            Some(false) => "nonzero".into(),
                            None => "not a cycle".into(),
                        },
                    ));
                }
                if !R::char_two() {
                    fields.push((
                        "sign_note".to_string(),
                        "integer homology maps are canonical up to a global sign".into(),
                    ));
                }
                Ok(fields)
            }
            let fields = with_theory(
                &cfg.theory,
                |t| go(&m, t, opts, class_terms.as_deref()),
                |t| go(&m, t, opts, class_terms.as_deref()),
                |t| go(&m, t, opts, class_terms.as_deref()),
            )?;
            let mut r = Report::new(command, Some(&cfg.theory), hash);
            r.field("frames", m.frames.len());
            for (k, v) in fields {
                r.field(&k, v);
            }
            Ok(r.render(&cfg.format))
        }
        "closed" => {
            need(1)?;
            let (m, bytes) = load_movie(&cfg.inputs[0], cfg.allow_r3)?;
            let hash = input_hash(&[bytes]);
            let opts = MovieOptions { budget: cfg.budget, verify_steps: false };
            let value = with_theory(
                &cfg.theory,
                |t| closed_surface_value(&m, &t, opts).map(|v| v.to_string()).map_err(movie_err),
                |t| closed_surface_value(&m, &t, opts).map(|v| v.to_string()).map_err(movie_err),
                |t| closed_surface_value(&m, &t, opts).map(|v| v.to_string()).map_err(movie_err),
            )?;
            let mut r = Report::new(command, Some(&cfg.theory), hash);
            r.field("chi", m.chi());
            r.field("value", value);
            Ok(r.render(&cfg.format))
        }
        "diff" => {
            need(2)?;
            let (m1, b1) = load_movie(&cfg.inputs[0], cfg.allow_r3)?;
            let (m2, b2) = load_movie(&cfg.inputs[1], cfg.allow_r3)?;
            let hash = input_hash(&[b1, b2]);
            let opts = MovieOptions { budget: cfg.budget, verify_steps: false };
            fn go<R: EucRing>(
                m1: &Movie,
                m2: &Movie,
                t: Theory<R>,
                opts: MovieOptions,
            ) -> Result<Vec<(String, String)>, AppError> {
                if m1.source().n() != 0 || !m1.source().free_loops.is_empty() {
                    return Err(AppError::Input("diff wants movies from the empty diagram".into()));
                }
                let one = Chain::gen(Gen { vertex: 0, labels: 0 });
                let (dc, f1, _f2) = difference_class(m1, m2, &t, &one, opts).map_err(movie_err)?;
                let mut fields = vec![
                    ("delta_terms".to_string(), dc.chain.0.len().to_string()),
                    ("delta_is_zero_class".to_string(), dc.is_zero_class.to_string()),
                ];
                if !dc.chain.is_zero() {
                    let any: &dyn std::any::Any = &F2Poly::h();
                    if let Some(h) = any.downcast_ref::<R>() {
                        let hom = f1.target.homology();
                        let hz = dc.chain.scaled(h);
                        let hzero = hom.is_zero_class(&f1.target, &hz).unwrap_or(true);
                        fields.push(("h_times_delta_is_zero_class".to_string(), hzero.to_string()));
                    }
                }
                Ok(fields)
            }
            let fields = with_theory(
                &cfg.theory,
                |t| go(&m1, &m2, t, opts),
                |t| go(&m1, &m2, t, opts),
                |t| go(&m1, &m2, t, opts),
            )?;
            let mut r = Report::new(command, Some(&cfg.theory), hash);
            r.field("chi", m1.chi());
            for (k, v) in fields {
                r.field(&k, v);
            }
            Ok(r.render(&cfg.format))
        }
        "psi" => {
            need(1)?;
            let bytes = read_file(&cfg.inputs[0])?;
            let text = String::from_utf8_lossy(&bytes).to_string();
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.first() != Some(&"braid") {
                return Err(AppError::Input("psi wants a braid file".into()));
            }
            let strands: usize = toks
                .get(1)
                .and_then(|t| t.parse().ok())
                .ok_or(AppError::Input("bad strand count".into()))?;
            let word: Result<Vec<i32>, _> = toks[2..].iter().map(|t| t.parse()).collect();
            let word = word.map_err(|_| AppError::Input("bad braid letter".into()))?;
            let psi = plamenevskaya(&word, strands).map_err(input_err)?;
            let mut r = Report::new(command, Some(&cfg.theory), input_hash(&[bytes]));
            r.field("writhe", psi.writhe);
            r.field("strands", psi.strands);
            r.field("bigrading", format!("({}, {})", psi.h, psi.q));
            let (cycle, nonzero) = with_theory(
                &cfg.theory,
                |t| {
                    Ok((
                        psi.certify_cycle(&t).map_err(input_err)?,
                        psi.nonzero_in_homology(&t).map_err(input_err)?,
                    ))
                },
                |t| {
                    Ok((
                        psi.certify_cycle(&t).map_err(input_err)?,
                        psi.nonzero_in_homology(&t).map_err(input_err)?,
                    ))
                },
                |t| {
                    Ok((
                        psi.certify_cycle(&t).map_err(input_err)?,
                        psi.nonzero_in_homology(&t).map_err(input_err)?,
                    ))
                },
            )?;
            r.field("cycle", cycle);
            r.field("nonzero_in_homology", nonzero);
            Ok(r.render(&cfg.format))
        }
        "s" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            let s = s_invariant(&d).map_err(input_err)?;
            let mut r = Report::new(command, Some("bn-f2h"), input_hash(&[bytes]));
            r.field("s", s);
            Ok(r.render(&cfg.format))
        }
        "profile" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            let p = torsion_profile(&d).map_err(input_err)?;
            let mut r = Report::new(command, Some("bn-f2h"), input_hash(&[bytes]));
            r.field("stable_page", p.stable_page);
            r.field("stable_rank", p.total_stable_rank);
            if cfg.format == "json" {
                let mut pages = String::from("[");
                for (i, page) in p.pages.iter().enumerate() {
                    if i > 0 {
                        pages.push(',');
                    }
                    pages.push('[');
                    let mut first = true;
                    for ((h, q), dim) in page {
                        if !first {
                            pages.push(',');
                        }
                        first = false;
                        let _ = write!(pages, "{{\"h\":{},\"q\":{},\"dim\":{}}}", h, q, dim);
                    }
                    pages.push(']');
                }
                pages.push(']');
                r.field("pages", pages);
            } else {
                for (i, page) in p.pages.iter().enumerate() {
                    let cells: Vec<String> =
                        page.iter().map(|((h, q), d)| format!("({},{}):{}", h, q, d)).collect();
                    r.field(&format!("page_{}", i + 1), cells.join(" "));
                }
            }
            Ok(r.render(&cfg.format))
        }
        "verify-formal" => {
            let cert = verify_r1_proof();
            let mut r = Report::new(command, None, input_hash(&[]));
            for (name, ok) in &cert.steps {
                r.field(name, if *ok { "pass" } else { "FAIL" });
            }
            r.field("certificate", if cert.pass() { "pass" } else { "FAIL" });
            if !cert.pass() {
                return Err(AppError::Input(r.render(&cfg.format)));
            }
            Ok(r.render(&cfg.format))
        }
        "ribbon-check" => {
            need(1)?;
            let (m, bytes) = load_movie(&cfg.inputs[0], cfg.allow_r3)?;
            let opts = MovieOptions { budget: cfg.budget, verify_steps: false };
            let rep = ribbon_double_check(&m, opts).map_err(input_err)?;
            let mut r = Report::new(command, Some("kh-f2"), input_hash(&[bytes]));
            r.field("doubled_chi", rep.doubled_chi);
            r.field("map_is_identity", rep.map_is_identity);
            r.field("injective", rep.map_is_identity);
            Ok(r.render(&cfg.format))
        }
        "dual" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            fn go<R: EucRing>(d: &LinkDiagram, t: Theory<R>, budget: u128) -> Result<HomologyModule, AppError> {
                let cx = GradedComplex::build(d.clone(), t, budget).map_err(complex_err)?;
                Ok(dual_homology(&cx))
            }
            let module = with_theory(
                &cfg.theory,
                |t| go(&d, t, cfg.budget),
                |t| go(&d, t, cfg.budget),
                |t| go(&d, t, cfg.budget),
            )?;
            let mut r = Report::new(command, Some(&cfg.theory), input_hash(&[bytes]));
            r.table = Some(module);
            Ok(r.render(&cfg.format))
        }
        "reduce" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            if d.n() > 12 {
                return Err(AppError::Refused("formal reduction limited to 12 crossings".into()));
            }
            let fc = bracket(&d);
            let before = fc.generator_count();
            let (dl, _) = deloop(&fc);
            let (red, _) = gauss_reduce(&dl);
            let after = red.generator_count();
            let mut r = Report::new(command, Some(&cfg.theory), input_hash(&[bytes]));
            r.field("generators_before", before);
            r.field("generators_after", after);
            let module = with_theory(
                &cfg.theory,
                |t| Ok(tqft_homology(&red, &t)),
                |t| Ok(tqft_homology(&red, &t)),
                |_t: Theory<F2Poly>| {
                    Err(AppError::Input(
                        "the dotted reduction computes Khovanov theories; use kh-z or kh-f2".into(),
                    ))
                },
            )?;
            r.table = Some(module);
            Ok(r.render(&cfg.format))
        }
        "bn-generators" => {
            need(1)?;
            let (d, bytes) = load_diagram(&cfg.inputs[0])?;
            let gens = bn_generators(&d).map_err(input_err)?;
            let thetas = theta_classes(&d).is_ok();
            let mut r = Report::new(command, Some("bn-f2h"), input_hash(&[bytes]));
            r.field("lee_generators", gens.len());
            r.field("all_cycles", true);
            r.field("theta_classes", if thetas { 2 } else { 0 });
            Ok(r.render(&cfg.format))
        }
        other => Err(AppError::Input(format!("unknown command {:?}\n{}", other, usage()))),
    }
}
