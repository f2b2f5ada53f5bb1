use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use paroper::curve::{riemann_hurwitz_genus, MarkedCurve};
use paroper::fuchsian::{self, FuchsianSystem, MonicOperator, OpPoint};
use paroper::rational::{self, Rational};
use paroper::{jet, oper, orbifold, Error, LocallyAbelianBundle};
use serde::Serialize;
use serde_json::{json, Value};

mod table;

use table::Table;

#[derive(Parser)]
#[command(
    name = "paroper",
    version,
    about = "Parabolic bundles, opers and Fuchsian monodromy"
)]
struct Cli {
    /// Emit a JSON result object instead of text tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CurveArg {
    /// Curve JSON (file path or inline). Defaults to the projective line with three level-5 points.
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Args)]
struct RankArg {
    /// Oper rank r.
    #[arg(long)]
    rank: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a curve and print its invariants.
    Validate(CurveArg),
    /// The Gunning bundle, its theta line and quotient.
    Gunning(CurveArg),
    /// Symmetric power of the Gunning bundle with flag tables.
    Sym {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        power: usize,
    },
    /// Oper filtration with closed-form checks.
    Filtration {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Degrees of the xi bundles.
    Xi {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        rank: RankArg,
        /// Only this k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Griffiths transversality degree bounds.
    Transversality {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Graded pieces of the parabolic jet bundle.
    Jets {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        order: usize,
    },
    /// Graded pieces of the differential operator bundle between two bundles.
    Diffspace {
        #[command(flatten)]
        curve: CurveArg,
        /// trivial | gunning | theta | quotient | theta:M | bundle JSON (file or inline)
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        order: usize,
    },
    /// Symbol and graded pieces of order-r operators between theta powers.
    OperOperators {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        rank: RankArg,
    },
    /// Randomized parabolic versus orbifold cross-check.
    OracleCheck {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        cover_degree: Option<u64>,
    },
    /// Lift of the theta line to the cover is a theta characteristic.
    ThetaCheck {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        cover_degree: Option<u64>,
    },
    /// Pushforward of the structure sheaf of the cover has parabolic degree 0.
    Regrep {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        cover_degree: Option<u64>,
    },
    /// Numerical monodromy of a Fuchsian system.
    Monodromy {
        /// System JSON (file or inline).
        #[arg(long)]
        system: String,
        /// Puncture label or `inf`; all loops when omitted.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Expected weights at --point, comma separated, for a spectrum check.
        #[arg(long, value_delimiter = ',')]
        expect: Option<Vec<String>>,
        /// Induced system on this symmetric power first.
        #[arg(long)]
        power: Option<usize>,
        /// Also run the rank-2 irreducibility check.
        #[arg(long)]
        irreducibility: bool,
    },
    /// Indicial polynomial, exponents and companion residue of an operator.
    Indicial {
        /// Operator JSON (file or inline).
        #[arg(long)]
        op: String,
        /// Rational coordinate or `inf`.
        #[arg(long)]
        point: String,
    },
    /// Chart-gauge sub-principal form of an operator.
    Subprincipal {
        #[arg(long)]
        op: String,
    },
    /// Exponents of an operator against the oper residue weights.
    OperCheck {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        rank: RankArg,
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Serialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Status {
    Ok,
    Fail,
    Warning,
}

#[derive(Serialize)]
struct CommandResult {
    status: Status,
    payload: Value,
    diagnostics: Vec<String>,
}

struct Outcome {
    result: CommandResult,
    text: String,
}

impl Outcome {
    fn new(pass: bool, payload: Value, text: String) -> Self {
        Outcome {
            result: CommandResult {
                status: if pass { Status::Ok } else { Status::Fail },
                payload,
                diagnostics: vec![],
            },
            text,
        }
    }

    fn ok(payload: Value, text: String) -> Self {
        Self::new(true, payload, text)
    }

    fn warn(mut self, warnings: impl IntoIterator<Item = String>) -> Self {
        for w in warnings {
            if self.result.status == Status::Ok {
                self.result.status = Status::Warning;
            }
            self.result.diagnostics.push(format!("warning: {w}"));
        }
        self
    }
}

fn read_input(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg))
        .map_err(|e| Error::Parse(format!("cannot read `{arg}`: {e}")))
}

fn load_curve(arg: &CurveArg) -> Result<Arc<MarkedCurve>, Error> {
    match &arg.curve {
        Some(c) => Ok(Arc::new(MarkedCurve::from_json(&read_input(c)?)?)),
        None => Ok(Arc::new(MarkedCurve::with_levels(0, &[5, 5, 5])?)),
    }
}

fn load_bundle(curve: &Arc<MarkedCurve>, name: &str) -> Result<LocallyAbelianBundle, Error> {
    match name {
        "trivial" => Ok(LocallyAbelianBundle::trivial(curve.clone())),
        "gunning" => oper::gunning(curve),
        "theta" => oper::theta_line(curve),
        "quotient" => oper::theta_quotient(curve),
        s if s.starts_with("theta:") => {
            let m: i64 = s[6..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad theta power `{s}`")))?;
            oper::theta_power(curve, m)
        }
        s => {
            let value: Value =
                serde_json::from_str(&read_input(s)?).map_err(|e| Error::Parse(e.to_string()))?;
            LocallyAbelianBundle::from_json(curve.clone(), &value)
        }
    }
}

fn fmt_q(q: &Rational) -> String {
    rational::format(q)
}

fn fmt_weights(ws: &[Rational]) -> String {
    ws.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

fn fmt_c(z: Complex64) -> String {
    // Avoid printing rounding noise as "-0.0000000000".
    let clean = |x: f64| if x.abs() < 5e-11 { 0.0 } else { x };
    format!("{:+.10} {:+.10}i", clean(z.re), clean(z.im))
}

fn bundle_rows(t: &mut Table, name: &str, b: &LocallyAbelianBundle) {
    for (p, ws) in b.curve().points().iter().zip(b.weights()) {
        t.row([
            name.to_string(),
            b.rank().to_string(),
            b.degree().to_string(),
            fmt_q(&b.par_deg()),
            p.label.clone(),
            fmt_weights(ws),
        ]);
    }
}

fn bundle_table() -> Table {
    Table::new(["bundle", "rank", "degree", "par_deg", "point", "weights"])
}

fn validate(curve: &Arc<MarkedCurve>) -> Result<Outcome, Error> {
    let d = curve.default_cover_degree();
    let cover_genus = riemann_hurwitz_genus(curve, d).ok();
    let mut t = Table::new(["label", "level", "coordinate"]);
    for p in curve.points() {
        t.row([
            p.label.clone(),
            p.level.to_string(),
            p.coordinate
                .map(|c| c.to_string())
                .unwrap_or_else(|| "-".into()),
        ]);
    }
    let text = format!(
        "genus {}\npoints {}\nlog canonical degree {}\nminimal cover degree {}\ncover genus {}\n\n{}",
        curve.genus(),
        curve.num_points(),
        curve.log_canonical_degree(),
        d,
        cover_genus.map(|g| g.to_string()).unwrap_or_else(|| "none (odd ramification)".into()),
        t
    );
    let payload = json!({
        "curve": serde_json::from_str::<Value>(&curve.to_json()).expect("curve json"),
        "log_canonical_degree": curve.log_canonical_degree(),
        "cover_degree": d,
        "cover_genus": cover_genus,
        "oper_parameters": oper::oper_parameters(curve).ok(),
    });
    Ok(Outcome::ok(payload, text))
}

fn gunning(curve: &Arc<MarkedCurve>) -> Result<Outcome, Error> {
    let e = oper::gunning(curve)?;
    let l = oper::theta_line(curve)?;
    let q = oper::theta_quotient(curve)?;
    let mut t = bundle_table();
    bundle_rows(&mut t, "E", &e);
    bundle_rows(&mut t, "L", &l);
    bundle_rows(&mut t, "E/L", &q);
    let pass = e.par_deg() == Rational::from_integer(0);
    let payload = json!({ "gunning": e.to_json(), "theta": l.to_json(), "quotient": q.to_json(), "par_deg_zero": pass });
    Ok(Outcome::new(pass, payload, t.to_string()))
}

fn sym(curve: &Arc<MarkedCurve>, k: usize) -> Result<Outcome, Error> {
    let s = oper::gunning(curve)?.sym_pow(k);
    let mut t = bundle_table();
    bundle_rows(&mut t, &format!("Sym^{k} E"), &s);
    let mut flags = Table::new(["point", "weight", "multiplicity"]);
    let mut flag_json = serde_json::Map::new();
    for p in curve.points() {
        let rows = s.flag_table(&p.label)?;
        for r in &rows {
            flags.row([
                p.label.clone(),
                fmt_q(&r.weight),
                r.multiplicity.to_string(),
            ]);
        }
        flag_json.insert(
            p.label.clone(),
            serde_json::to_value(&rows).expect("flag rows"),
        );
    }
    let payload = json!({ "power": k, "bundle": s.to_json(), "flags": flag_json });
    Ok(Outcome::ok(payload, format!("{t}\n{flags}")))
}

fn filtration(curve: &Arc<MarkedCurve>, r: usize) -> Result<Outcome, Error> {
    let f = oper::oper_filtration(curve, r)?;
    let mut t = Table::new([
        "j",
        "rank",
        "degree",
        "par_deg",
        "formula",
        "graded par_deg",
        "formula",
        "graded weights",
    ]);
    let mut pass = true;
    for row in &f.rows {
        let want_f = oper::filtration_par_deg_formula(curve, r, row.j)?;
        let want_gr = oper::graded_par_deg_formula(curve, r, row.j)?;
        pass &= want_f == row.par_deg && want_gr == row.graded.par_deg();
        let weights = row
            .graded
            .weights()
            .iter()
            .map(|w| fmt_weights(w))
            .collect::<Vec<_>>()
            .join(" | ");
        t.row([
            row.j.to_string(),
            row.rank.to_string(),
            row.degree.to_string(),
            fmt_q(&row.par_deg),
            fmt_q(&want_f),
            fmt_q(&row.graded.par_deg()),
            fmt_q(&want_gr),
            weights,
        ]);
    }
    let mut payload = f.to_json();
    payload["formulas_match"] = json!(pass);
    Ok(Outcome::new(pass, payload, t.to_string()))
}

fn xi(curve: &Arc<MarkedCurve>, r: usize, only: Option<usize>) -> Result<Outcome, Error> {
    let ks: Vec<usize> = match only {
        Some(k) => vec![k],
        None => (2..r).collect(),
    };
    let mut t = Table::new(["k", "xi degree", "twisted degree"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for k in ks {
        let d = oper::xi_degree(curve, r, k)?;
        let twisted = d + curve.log_canonical_degree();
        pass &= twisted < 0;
        t.row([k.to_string(), d.to_string(), twisted.to_string()]);
        rows.push(json!({ "k": k, "xi_degree": d, "twisted_degree": twisted }));
    }
    Ok(Outcome::new(
        pass,
        json!({ "r": r, "rows": rows }),
        t.to_string(),
    ))
}

fn transversality(curve: &Arc<MarkedCurve>, r: usize) -> Result<Outcome, Error> {
    let rep = oper::transversality_report(curve, r)?;
    let mut t = Table::new(["k", "xi degree", "twisted degree"]);
    for x in &rep.xi {
        t.row([
            x.k.to_string(),
            x.xi_degree.to_string(),
            x.twisted_degree.to_string(),
        ]);
    }
    let mut f = Table::new(["j", "par_deg F^j"]);
    for p in &rep.filtration {
        f.row([p.j.to_string(), fmt_q(&p.par_deg)]);
    }
    let text = format!(
        "{t}\n{f}\ntransversality {}",
        if rep.pass { "holds" } else { "fails" }
    );
    Ok(Outcome::new(
        rep.pass,
        serde_json::to_value(&rep).expect("report"),
        text,
    ))
}

fn jets(curve: &Arc<MarkedCurve>, k: usize) -> Result<Outcome, Error> {
    let tower = jet::jet_tower(curve, k);
    let mut t = bundle_table();
    for (j, g) in tower.graded.iter().enumerate() {
        bundle_rows(&mut t, &format!("gr{j}"), g);
    }
    let text = format!(
        "{t}\ntotal rank {} degree {}",
        tower.rank(),
        tower.total_degree()
    );
    Ok(Outcome::ok(tower.to_json(), text))
}

fn diffspace(
    curve: &Arc<MarkedCurve>,
    source: &str,
    target: &str,
    k: usize,
) -> Result<Outcome, Error> {
    let v = load_bundle(curve, source)?;
    let w = load_bundle(curve, target)?;
    let space = jet::diff_space(&v, &w, k)?;
    let mut t = bundle_table();
    for p in &space.pieces {
        bundle_rows(&mut t, &format!("j={}", p.j), &p.bundle);
    }
    let total = space.total();
    let text = format!(
        "{t}\ntotal rank {} degree {} euler characteristic {}",
        total.rank(),
        total.degree(),
        total.euler_characteristic()
    );
    Ok(Outcome::ok(space.to_json(), text))
}

fn oper_operators(curve: &Arc<MarkedCurve>, r: usize) -> Result<Outcome, Error> {
    let rep = jet::oper_operator_space(curve, r)?;
    let mut t = Table::new(["j", "L power", "degree", "weights", "h0"]);
    for p in &rep.pieces {
        t.row([
            p.j.to_string(),
            p.power.to_string(),
            p.degree.to_string(),
            fmt_weights(&p.weights),
            p.h0.map(|h| h.to_string()).unwrap_or_else(|| "-".into()),
        ]);
    }
    let text = format!(
        "{t}\nsymbol bundle trivial: {}\naffine dimension: {}{}\nsub-principal codomain dimension: {}",
        rep.symbol_trivial,
        rep.affine_dimension.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
        if rep.dimension_exact { "" } else { " (upper bound)" },
        rep.subprincipal_codomain_dim
    );
    Ok(Outcome::new(
        rep.symbol_trivial,
        serde_json::to_value(&rep).expect("report"),
        text,
    ))
}

fn oracle_check(
    curve: &Arc<MarkedCurve>,
    seed: u64,
    count: usize,
    d: Option<u64>,
) -> Result<Outcome, Error> {
    let rep = orbifold::oracle_run(curve, seed, count, d)?;
    let mut text = format!(
        "seed {} cover degree {}: {} of {} expressions agree",
        rep.seed, rep.cover_degree, rep.passed, rep.count
    );
    for f in &rep.failures {
        text.push_str(&format!(
            "\nminimal failing expression: {}",
            serde_json::to_string(f).expect("expr")
        ));
    }
    let pass = rep.pass();
    let mut out = Outcome::new(pass, serde_json::to_value(&rep).expect("report"), text);
    out.result
        .diagnostics
        .extend(rep.errors.iter().map(|e| format!("error: {e}")));
    Ok(out)
}

fn theta_check(curve: &Arc<MarkedCurve>, d: Option<u64>) -> Result<Outcome, Error> {
    let d = d.unwrap_or_else(|| curve.default_cover_degree());
    let rep = orbifold::theta_characteristic_check(curve, d)?;
    let text = format!(
        "cover degree {} genus {}: 2 deg(L_Y) = {}, 2g_Y - 2 = {} ({})",
        rep.cover_degree,
        rep.cover_genus,
        2 * rep.theta_y_degree,
        2 * rep.cover_genus as i64 - 2,
        if rep.pass { "pass" } else { "fail" }
    );
    Ok(Outcome::new(
        rep.pass,
        serde_json::to_value(&rep).expect("report"),
        text,
    ))
}

fn regrep(curve: &Arc<MarkedCurve>, d: Option<u64>) -> Result<Outcome, Error> {
    let d = d.unwrap_or_else(|| curve.default_cover_degree());
    let rep = jet::regular_rep_check(curve, d)?;
    let text = format!(
        "cover degree {} genus {}: rank {} degree {} par_deg {} ({})",
        rep.cover_degree,
        rep.cover_genus,
        rep.rank,
        rep.degree,
        fmt_q(&rep.par_deg),
        if rep.pass { "pass" } else { "fail" }
    );
    Ok(Outcome::new(
        rep.pass,
        serde_json::to_value(&rep).expect("report"),
        text,
    ))
}

fn matrix_text(m: &fuchsian::linalg::CMatrix) -> String {
    (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn monodromy(
    system: &str,
    point: Option<&str>,
    tol: f64,
    expect: Option<&[String]>,
    power: Option<usize>,
    irreducibility: bool,
) -> Result<Outcome, Error> {
    let mut system = FuchsianSystem::from_json(&read_input(system)?)?;
    if let Some(k) = power {
        system = system.symmetric_power(k)?;
    }
    let mut text = String::new();
    let mut payload = serde_json::Map::new();
    let mut pass = true;
    let mut warnings = Vec::new();
    match point {
        Some(p) => {
            let m = fuchsian::numerical_monodromy(&system, p, tol)?;
            text.push_str(&format!(
                "monodromy at {p} (error estimate {:.1e})\n{}\n",
                m.error_estimate,
                matrix_text(&m.matrix)
            ));
            text.push_str("eigenvalues\n");
            for z in m.eigenvalues() {
                text.push_str(&format!("  {}\n", fmt_c(z)));
            }
            warnings.extend(m.warnings.iter().cloned());
            payload.insert("monodromy".into(), m.to_json());
            if let Some(ws) = expect {
                let weights = ws
                    .iter()
                    .map(|w| rational::parse(w).map(|q| rational::to_f64(&q)))
                    .collect::<Result<Vec<f64>, Error>>()?;
                let rep = fuchsian::monodromy_spectrum_check(&system, p, &weights, tol)?;
                pass &= rep.pass;
                text.push_str(&format!(
                    "spectrum check: distance {:.1e}, semisimple {}, condition {:.1e} ({})\n",
                    rep.distance,
                    rep.semisimple,
                    rep.condition_number,
                    if rep.pass { "pass" } else { "fail" }
                ));
                payload.insert("spectrum_check".into(), rep.to_json());
            }
        }
        None => {
            if expect.is_some() {
                return Err(Error::InvalidArgument("--expect needs --point".into()));
            }
            let atlas = fuchsian::monodromy_atlas(&system, tol)?;
            let mut t = Table::new(["point", "eigenvalues", "error"]);
            for m in &atlas.monodromies {
                let ev: Vec<String> = m.eigenvalues().into_iter().map(fmt_c).collect();
                t.row([
                    m.label.clone(),
                    ev.join("; "),
                    format!("{:.1e}", m.error_estimate),
                ]);
                warnings.extend(m.warnings.iter().cloned());
            }
            pass &= atlas.product_defect <= 10.0 * tol;
            text.push_str(&format!(
                "{t}\nloop order {} then inf, product defect {:.1e}\n",
                atlas.product_order.join(", "),
                atlas.product_defect
            ));
            payload.insert("atlas".into(), atlas.to_json());
        }
    }
    if irreducibility {
        let rep = fuchsian::irreducibility_check(&system, tol)?;
        pass &= rep.pass;
        text.push_str(&format!(
            "irreducibility: min common-eigenvector residual {:.1e} vs threshold {:.1e} ({})\n",
            rep.min_residual,
            rep.threshold,
            if rep.pass { "pass" } else { "fail" }
        ));
        payload.insert(
            "irreducibility".into(),
            json!({ "min_residual": rep.min_residual, "threshold": rep.threshold, "candidates": rep.candidates, "pass": rep.pass }),
        );
    }
    Ok(Outcome::new(pass, Value::Object(payload), text.trim_end().to_string()).warn(warnings))
}

fn load_op(arg: &str) -> Result<MonicOperator, Error> {
    MonicOperator::from_json(&read_input(arg)?)
}

fn indicial(op: &str, point: &str) -> Result<Outcome, Error> {
    let op = load_op(op)?;
    let point: OpPoint = point.parse()?;
    let poly = fuchsian::indicial_polynomial(&op, point)?;
    let roots = fuchsian::indicial_roots(&op, point)?;
    let residue = fuchsian::companion(&op, point)?;
    let rows: Vec<String> = residue
        .residue
        .iter()
        .map(|r| format!("  [{}]", fmt_weights(r)))
        .collect();
    let text = format!(
        "indicial polynomial at {point}: {}\nexponents: {}\ncompanion residue\n{}",
        poly.to_string().replace('z', "s"),
        roots
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(", "),
        rows.join("\n")
    );
    let payload = json!({
        "point": point.to_string(),
        "polynomial": poly.to_strings(),
        "exponents": roots.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "companion": residue.to_json(),
    });
    Ok(Outcome::ok(payload, text))
}

fn subprincipal(op: &str) -> Result<Outcome, Error> {
    let op = load_op(op)?;
    let theta = fuchsian::subprincipal_form(&op);
    let text = format!(
        "operator: {}\nsub-principal form: ({theta}) dz\nvanishes: {}",
        op.to_string_pretty(),
        theta.is_zero()
    );
    let payload =
        json!({ "form": serde_json::to_value(&theta).expect("form"), "vanishes": theta.is_zero() });
    Ok(Outcome::ok(payload, text))
}

fn oper_check(curve: &Arc<MarkedCurve>, r: usize, op: &str, tol: f64) -> Result<Outcome, Error> {
    let op = load_op(op)?;
    let rep = fuchsian::oper_exponent_consistency(curve, r, &op, tol)?;
    let mut t = Table::new(["point", "at", "exponents", "weights", "distance", "result"]);
    for p in &rep.points {
        t.row([
            p.label.clone(),
            p.point.to_string(),
            p.exponents
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            fmt_weights(&p.weights),
            format!("{:.1e}", p.distance),
            if p.pass { "pass" } else { "fail" }.to_string(),
        ]);
    }
    let sum = match rep.exponent_sum_exact {
        Some(q) => fmt_q(&q),
        None => fmt_c(rep.exponent_sum),
    };
    let text = format!(
        "{t}\nexponent sum {sum}, Fuchs relation expects {} ({})",
        fmt_q(&rep.fuchs_expected),
        if rep.fuchs_holds { "holds" } else { "fails" }
    );
    Ok(Outcome::new(rep.pass, rep.to_json(), text))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Validate(c) => validate(&load_curve(c)?),
        Command::Gunning(c) => gunning(&load_curve(c)?),
        Command::Sym { curve, power } => sym(&load_curve(curve)?, *power),
        Command::Filtration { curve, rank } => filtration(&load_curve(curve)?, rank.rank),
        Command::Xi { curve, rank, k } => xi(&load_curve(curve)?, rank.rank, *k),
        Command::Transversality { curve, rank } => transversality(&load_curve(curve)?, rank.rank),
        Command::Jets { curve, order } => jets(&load_curve(curve)?, *order),
        Command::Diffspace {
            curve,
            source,
            target,
            order,
        } => diffspace(&load_curve(curve)?, source, target, *order),
        Command::OperOperators { curve, rank } => oper_operators(&load_curve(curve)?, rank.rank),
        Command::OracleCheck {
            curve,
            seed,
            count,
            cover_degree,
        } => oracle_check(&load_curve(curve)?, *seed, *count, *cover_degree),
        Command::ThetaCheck {
            curve,
            cover_degree,
        } => theta_check(&load_curve(curve)?, *cover_degree),
        Command::Regrep {
            curve,
            cover_degree,
        } => regrep(&load_curve(curve)?, *cover_degree),
        Command::Monodromy {
            system,
            point,
            tol,
            expect,
            power,
            irreducibility,
        } => monodromy(
            system,
            point.as_deref(),
            *tol,
            expect.as_deref(),
            *power,
            *irreducibility,
        ),
        Command::Indicial { op, point } => indicial(op, point),
        Command::Subprincipal { op } => subprincipal(op),
        Command::OperCheck {
            curve,
            rank,
            op,
            tol,
        } => oper_check(&load_curve(curve)?, rank.rank, op, *tol),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    if cli.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&outcome.result).expect("result json")
        )?;
        return Ok(());
    }
    if !outcome.text.is_empty() {
        writeln!(out, "{}", outcome.text)?;
    }
    for d in &outcome.result.diagnostics {
        eprintln!("{d}");
    }
    if outcome.result.status == Status::Fail {
        writeln!(out, "status: fail")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).unwrap_or_else(|e| Outcome {
        result: CommandResult {
            status: Status::Fail,
            payload: Value::Null,
            diagnostics: vec![format!("error: {e}")],
        },
        text: String::new(),
    });
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = emit(&cli, &outcome);
    match outcome.result.status {
        Status::Fail => ExitCode::from(1),
        Status::Ok | Status::Warning => ExitCode::SUCCESS,
    }
}
