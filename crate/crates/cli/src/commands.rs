use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde_json::{json, Value};
use zdf_core::coset::{CosetIndexFunction, CosetPartition, UnitSubgroup};
use zdf_core::families::{
    compare_with_spectrum, family_mp_crt_seeded, family_p1p2_crt_seeded, family_p_power_minus,
    family_p_power_plus_s, family_p_squared, family_two_power, family_z4, match_family, table_rows,
    verify_family, FamilyDescriptor, FamilyId, Verdict, Verification, VerificationReport,
};
use zdf_core::modular::ResidueRing;
use zdf_core::scan::scan_range;
use zdf_core::spectrum::{spectrum_direct_with, spectrum_via_unions_with, ZdfSpectrum};
use zdf_core::{Error, Execution};

use crate::output::{list_text, set_cell, set_text, Output};

/// Largest modulus any command will materialize.
pub const MAX_MODULUS: u64 = 1 << 26;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = if matches!(err, Error::Inconsistency(_)) {
            EXIT_FAIL
        } else {
            EXIT_INVALID
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub struct Context {
    pub brute_bound: u64,
    pub seed_generator: Option<u64>,
    pub exec: Execution,
}

impl Context {
    fn inputs(&self, mut extra: Value) -> Value {
        extra["brute_bound"] = json!(self.brute_bound);
        extra["seed_generator"] = json!(self.seed_generator);
        extra
    }
}

#[derive(Debug, Default, Clone, clap::Args)]
pub struct FamilyParams {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub p1: Option<u64>,
    #[arg(long)]
    pub p2: Option<u64>,
    #[arg(long)]
    pub s1: Option<u64>,
    #[arg(long)]
    pub t1: Option<u64>,
    #[arg(long)]
    pub s2: Option<u64>,
    #[arg(long)]
    pub t2: Option<u64>,
}

impl FamilyParams {
    fn given(&self) -> BTreeMap<&'static str, u64> {
        [
            ("p", self.p),
            ("k", self.k),
            ("s", self.s),
            ("t", self.t),
            ("m", self.m),
            ("p1", self.p1),
            ("p2", self.p2),
            ("s1", self.s1),
            ("t1", self.t1),
            ("s2", self.s2),
            ("t2", self.t2),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
        .collect()
    }
}

pub fn parse_family(name: &str) -> Result<FamilyId, String> {
    FamilyId::from_cli_name(name).ok_or_else(|| {
        let known: Vec<&str> = FamilyId::ALL.iter().map(|f| f.cli_name()).collect();
        format!(
            "unknown family '{name}', expected one of: {}",
            known.join(", ")
        )
    })
}

fn require(value: Option<u64>, flag: &str, family: FamilyId) -> CliResult<u64> {
    value.ok_or_else(|| {
        CliError::invalid(format!("missing --{flag} for family {}", family.cli_name()))
    })
}

pub fn build_descriptors(
    family: FamilyId,
    params: &FamilyParams,
    seed: Option<u64>,
) -> CliResult<Vec<FamilyDescriptor>> {
    let p = |flag: &str, v: Option<u64>| require(v, flag, family);
    let descriptors = match family {
        FamilyId::Z4 => family_z4(),
        FamilyId::TwoPower => vec![family_two_power(p("k", params.k)?)?],
        FamilyId::PSquared => vec![family_p_squared(p("p", params.p)?)?],
        FamilyId::PPowerMinus => vec![family_p_power_minus(p("p", params.p)?, p("k", params.k)?)?],
        FamilyId::PPowerPlusS => {
            vec![family_p_power_plus_s(
                p("p", params.p)?,
                p("k", params.k)?,
                p("s", params.s)?,
            )?]
        }
        FamilyId::MpCrt => vec![family_mp_crt_seeded(
            p("m", params.m)?,
            p("p", params.p)?,
            p("s", params.s)?,
            p("t", params.t)?,
            seed,
        )?],
        FamilyId::P1p2Crt => vec![family_p1p2_crt_seeded(
            p("p1", params.p1)?,
            p("p2", params.p2)?,
            p("s1", params.s1)?,
            p("t1", params.t1)?,
            p("s2", params.s2)?,
            p("t2", params.t2)?,
            seed,
        )?],
    };
    for d in &descriptors {
        check_size(d.predicted_n)?;
    }
    Ok(descriptors)
}

fn check_size(n: u64) -> CliResult<()> {
    if n > MAX_MODULUS {
        return Err(CliError::invalid(format!(
            "n = {n} exceeds the supported maximum {MAX_MODULUS}"
        )));
    }
    Ok(())
}

fn subgroup_for(n: u64, e: u64) -> CliResult<UnitSubgroup> {
    check_size(n)?;
    let ring = ResidueRing::new(n)?;
    let e = ring.element(e)?;
    Ok(UnitSubgroup::generated_by(e, ring)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize to JSON")
}

fn params_text(d: &FamilyDescriptor) -> String {
    d.parameters
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn family_inputs(family: FamilyId, params: &FamilyParams) -> Value {
    json!({ "family": family.cli_name(), "parameters": params.given() })
}

// ---------------------------------------------------------------- construct

pub fn construct(ctx: &Context, family: FamilyId, params: &FamilyParams) -> CliResult<Output> {
    let descriptors = build_descriptors(family, params, ctx.seed_generator)?;
    let mut results = Vec::new();
    let mut text = String::new();
    let mut csv = vec![vec![
        "family".into(),
        "n".into(),
        "e".into(),
        "x".into(),
        "f_G".into(),
    ]];

    for d in &descriptors {
        let f = CosetIndexFunction::new(CosetPartition::new(d.subgroup()?));
        let g = f.subgroup();
        let cosets = f.partition().cosets();
        results.push(json!({
            "descriptor": to_value(d),
            "n": d.predicted_n,
            "e": d.generator,
            "k": g.order(),
            "subgroup": g.elements(),
            "cosets": cosets,
            "m": f.image_size(),
            "table": f.table(),
        }));

        let _ = writeln!(text, "family {} {}", d.family, params_text(d));
        let _ = writeln!(
            text,
            "  n = {}, e = {}, |G| = {}",
            d.predicted_n,
            d.generator,
            g.order()
        );
        let _ = writeln!(text, "  G = {}", set_text(g.elements()));
        let _ = writeln!(
            text,
            "  predicted m = {}, S = {}",
            d.predicted_m,
            set_text(&d.predicted_s)
        );
        for c in &d.predicted_per_class {
            let _ = writeln!(text, "  N(a) = {} for {}", c.count, c.class);
        }
        let _ = writeln!(text, "  cosets ({}):", cosets.len());
        for (i, c) in cosets.iter().enumerate() {
            let _ = writeln!(text, "    C{i} = {}", set_text(c));
        }
        let table: Vec<u64> = f.table().iter().map(|&v| v as u64).collect();
        let _ = writeln!(text, "  f_G = {}", list_text(&table));
        for note in &d.notes {
            let _ = writeln!(text, "  note: {note}");
        }

        for (x, &v) in f.table().iter().enumerate() {
            csv.push(vec![
                d.family.as_str().into(),
                d.predicted_n.to_string(),
                d.generator.to_string(),
                x.to_string(),
                v.to_string(),
            ]);
        }
    }

    Ok(Output {
        command: "construct",
        inputs: ctx.inputs(family_inputs(family, params)),
        results: Value::Array(results),
        text,
        csv,
        exit_code: EXIT_OK,
    })
}

// ---------------------------------------------------------------- spectrum

/// The union spectrum, plus the direct one when `n` is within the bound.
struct Measured {
    spectrum: ZdfSpectrum,
    routes_agree: Option<bool>,
}

fn measure(subgroup: &UnitSubgroup, ctx: &Context) -> CliResult<Measured> {
    let spectrum = spectrum_via_unions_with(subgroup, ctx.exec)?;
    let routes_agree = (subgroup.modulus() <= ctx.brute_bound).then(|| {
        let f = CosetIndexFunction::new(CosetPartition::new(subgroup.clone()));
        spectrum_direct_with(&f, ctx.exec) == spectrum
    });
    Ok(Measured {
        spectrum,
        routes_agree,
    })
}

fn routes_text(agree: Option<bool>) -> &'static str {
    match agree {
        Some(true) => "direct and union routes agree",
        Some(false) => "direct and union routes DISAGREE",
        None => "direct cross-check skipped (n above brute bound)",
    }
}

pub fn spectrum(ctx: &Context, n: u64, e: u64) -> CliResult<Output> {
    let g = subgroup_for(n, e)?;
    let Measured {
        spectrum: s,
        routes_agree,
    } = measure(&g, ctx)?;
    let per_shift: Vec<Value> = s.shifts().map(|(a, c)| json!({ "a": a, "N": c })).collect();
    let results = json!({
        "n": n,
        "e": g.generator(),
        "k": g.order(),
        "subgroup": g.elements(),
        "m": s.image_size(),
        "S": s.values(),
        "lambda": s.lambda(),
        "classification": s.classification().as_str(),
        "per_shift": per_shift,
        "direct_checked": routes_agree.is_some(),
        "routes_agree": routes_agree,
    });

    let mut text = String::new();
    let _ = writeln!(text, "n = {n}, e = {}, |G| = {}", g.generator(), g.order());
    let _ = writeln!(
        text,
        "m = {}, S = {}, {}",
        s.image_size(),
        set_text(s.values()),
        s.classification()
    );
    let _ = writeln!(text, "{}", routes_text(routes_agree));
    for (a, c) in s.shifts() {
        let _ = writeln!(text, "  N({a}) = {c}");
    }

    let mut csv = vec![vec!["a".to_string(), "N".to_string()]];
    csv.extend(s.shifts().map(|(a, c)| vec![a.to_string(), c.to_string()]));

    Ok(Output {
        command: "spectrum",
        inputs: ctx.inputs(json!({ "n": n, "e": e })),
        results,
        text,
        csv,
        exit_code: if routes_agree == Some(false) {
            EXIT_FAIL
        } else {
            EXIT_OK
        },
    })
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Default, Clone)]
pub struct Expectations {
    pub m: Option<u64>,
    pub s: Option<Vec<u64>>,
}

impl Expectations {
    fn normalized(&self) -> Self {
        let s = self.s.clone().map(|mut s| {
            s.sort_unstable();
            s.dedup();
            s
        });
        Expectations { m: self.m, s }
    }

    fn inputs(&self) -> Value {
        json!({ "m": self.m, "S": self.s })
    }

    fn mismatches(&self, measured_m: u64, measured_s: &[u64]) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(m) = self.m.filter(|&m| m != measured_m) {
            out.push(format!("m: expected {m}, measured {measured_m}"));
        }
        if let Some(s) = self.s.as_ref().filter(|s| s.as_slice() != measured_s) {
            out.push(format!("S: expected {s:?}, measured {measured_s:?}"));
        }
        out
    }
}

fn report_json(report: &VerificationReport, routes_agree: Option<bool>) -> Value {
    let mut v = to_value(report);
    v["direct_checked"] = json!(routes_agree.is_some());
    v["routes_agree"] = json!(routes_agree);
    v
}

fn verdict_of(mismatches: &[String]) -> Verdict {
    if mismatches.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Verifies one descriptor. Within the brute bound this is the library's
/// two-route verification; above it only the union route is measured.
fn check_descriptor(
    d: &FamilyDescriptor,
    ctx: &Context,
    expect: &Expectations,
) -> CliResult<(VerificationReport, Option<bool>)> {
    let (mut report, routes_agree) = match verify_family(d, ctx.brute_bound, ctx.exec)? {
        Verification::Verified(r) => (r, Some(true)),
        Verification::Unverifiable { .. } => {
            let g = d.subgroup()?;
            let s = spectrum_via_unions_with(&g, ctx.exec)?;
            (compare_with_spectrum(d, &g, &s, true), None)
        }
    };
    let routes_agree = routes_agree.map(|_| report.routes_agree);
    let extra = expect.mismatches(report.measured_m, &report.measured_s);
    report.mismatches.extend(extra);
    report.verdict = verdict_of(&report.mismatches);
    Ok((report, routes_agree))
}

fn report_text(text: &mut String, r: &VerificationReport, routes_agree: Option<bool>) {
    let d = &r.descriptor;
    let _ = writeln!(
        text,
        "{} {}: {}e = {}",
        r.verdict,
        d.family,
        params_text(d)
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| format!("{s}, "))
            .collect::<String>(),
        d.generator
    );
    let _ = writeln!(
        text,
        "  predicted n = {}, m = {}, S = {}",
        d.predicted_n,
        d.predicted_m,
        set_text(&d.predicted_s)
    );
    let _ = writeln!(
        text,
        "  measured  n = {}, m = {}, S = {}, {}",
        r.measured_n,
        r.measured_m,
        set_text(&r.measured_s),
        r.classification
    );
    for c in &r.class_checks {
        let mark = if c.matches { "ok" } else { "MISMATCH" };
        let _ = writeln!(
            text,
            "  {}: predicted N = {}, observed {} over {} shifts, {mark}",
            c.class,
            c.predicted,
            set_text(&c.observed),
            c.shifts
        );
    }
    let _ = writeln!(text, "  {}", routes_text(routes_agree));
    for m in &r.mismatches {
        let _ = writeln!(text, "  mismatch: {m}");
    }
}

pub fn verify_family_cmd(
    ctx: &Context,
    family: FamilyId,
    params: &FamilyParams,
    expect: &Expectations,
) -> CliResult<Output> {
    let expect = expect.normalized();
    let descriptors = build_descriptors(family, params, ctx.seed_generator)?;
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut csv = vec![csv_header_verdict()];
    let mut all_pass = true;
    for d in &descriptors {
        let (r, agree) = check_descriptor(d, ctx, &expect)?;
        all_pass &= r.verdict.is_pass();
        report_text(&mut text, &r, agree);
        csv.push(csv_row_verdict(d.family.as_str(), &r));
        reports.push(report_json(&r, agree));
    }
    let verdict = if all_pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let _ = writeln!(text, "verdict: {verdict}");

    let mut inputs = family_inputs(family, params);
    inputs["expect"] = expect.inputs();
    Ok(Output {
        command: "verify",
        inputs: ctx.inputs(inputs),
        results: json!({ "verdict": verdict, "reports": reports }),
        text,
        csv,
        exit_code: if all_pass { EXIT_OK } else { EXIT_FAIL },
    })
}

pub fn verify_instance(ctx: &Context, n: u64, e: u64, expect: &Expectations) -> CliResult<Output> {
    let expect = expect.normalized();
    let g = subgroup_for(n, e)?;
    let Measured {
        spectrum: s,
        routes_agree,
    } = measure(&g, ctx)?;

    let mut mismatches = Vec::new();
    if routes_agree == Some(false) {
        mismatches.push("direct and union spectra differ".to_string());
    }
    let matched = match_family(&g, &s);
    let matched_report = matched
        .as_ref()
        .map(|d| compare_with_spectrum(d, &g, &s, true));
    if let Some(r) = &matched_report {
        mismatches.extend(r.mismatches.iter().cloned());
    }
    mismatches.extend(expect.mismatches(s.image_size(), s.values()));
    let verdict = verdict_of(&mismatches);

    let results = json!({
        "n": n,
        "e": g.generator(),
        "k": g.order(),
        "subgroup": g.elements(),
        "m": s.image_size(),
        "S": s.values(),
        "classification": s.classification().as_str(),
        "direct_checked": routes_agree.is_some(),
        "routes_agree": routes_agree,
        "matched_family": matched.as_ref().map(|d| d.family.as_str()),
        "matched_descriptor": matched.as_ref().map(to_value),
        "class_checks": matched_report.as_ref().map(|r| to_value(&r.class_checks)),
        "mismatches": mismatches,
        "verdict": verdict,
    });

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{verdict} n = {n}, e = {}, |G| = {}",
        g.generator(),
        g.order()
    );
    let _ = writeln!(
        text,
        "  m = {}, S = {}, {}",
        s.image_size(),
        set_text(s.values()),
        s.classification()
    );
    let _ = writeln!(text, "  {}", routes_text(routes_agree));
    match &matched {
        Some(d) => {
            let _ = writeln!(text, "  matches family {} {}", d.family, params_text(d));
        }
        None => {
            let _ = writeln!(text, "  no known family matches");
        }
    }
    for m in &mismatches {
        let _ = writeln!(text, "  mismatch: {m}");
    }

    let csv = vec![
        vec![
            "n".into(),
            "e".into(),
            "k".into(),
            "m".into(),
            "S".into(),
            "classification".into(),
            "family".into(),
            "verdict".into(),
        ],
        vec![
            n.to_string(),
            g.generator().to_string(),
            g.order().to_string(),
            s.image_size().to_string(),
            set_cell(s.values()),
            s.classification().as_str().into(),
            matched
                .as_ref()
                .map(|d| d.family.as_str())
                .unwrap_or("")
                .into(),
            verdict.as_str().into(),
        ],
    ];

    let mut inputs = json!({ "n": n, "e": e });
    inputs["expect"] = expect.inputs();
    Ok(Output {
        command: "verify",
        inputs: ctx.inputs(inputs),
        results,
        text,
        csv,
        exit_code: if verdict.is_pass() {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
    })
}

fn csv_header_verdict() -> Vec<String> {
    [
        "family",
        "e",
        "n",
        "m",
        "S",
        "measured_n",
        "measured_m",
        "measured_S",
        "verdict",
    ]
    .map(String::from)
    .to_vec()
}

fn csv_row_verdict(label: &str, r: &VerificationReport) -> Vec<String> {
    let d = &r.descriptor;
    vec![
        label.into(),
        d.generator.to_string(),
        d.predicted_n.to_string(),
        d.predicted_m.to_string(),
        set_cell(&d.predicted_s),
        r.measured_n.to_string(),
        r.measured_m.to_string(),
        set_cell(&r.measured_s),
        r.verdict.as_str().into(),
    ]
}

// ---------------------------------------------------------------- scan

pub fn scan(ctx: &Context, n_min: u64, n_max: u64) -> CliResult<Output> {
    if n_min < 2 || n_min > n_max || n_max > ctx.brute_bound {
        return Err(CliError::invalid(format!(
            "scan range must satisfy 2 <= n_min <= n_max <= brute_bound ({}), got {n_min}..={n_max}",
            ctx.brute_bound
        )));
    }
    let records = scan_range(n_min, n_max, ctx.exec)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:>6} {:>6} {:>5} {:>6}  {:<15} {:<14} S",
        "n", "e", "k", "m", "class", "family"
    );
    for r in &records {
        let _ = writeln!(
            text,
            "{:>6} {:>6} {:>5} {:>6}  {:<15} {:<14} {}",
            r.n,
            r.e,
            r.k,
            r.m,
            r.classification.as_str(),
            r.family.map(|f| f.as_str()).unwrap_or("-"),
            set_text(&r.s)
        );
    }

    let mut csv = vec![["n", "e", "k", "m", "S", "classification", "family"]
        .map(String::from)
        .to_vec()];
    csv.extend(records.iter().map(|r| {
        vec![
            r.n.to_string(),
            r.e.to_string(),
            r.k.to_string(),
            r.m.to_string(),
            set_cell(&r.s),
            r.classification.as_str().into(),
            r.family.map(|f| f.as_str()).unwrap_or("").into(),
        ]
    }));

    Ok(Output {
        command: "scan",
        inputs: ctx.inputs(json!({ "n_min": n_min, "n_max": n_max })),
        results: to_value(&records),
        text,
        csv,
        exit_code: EXIT_OK,
    })
}

// ---------------------------------------------------------------- table

pub fn table(ctx: &Context) -> CliResult<Output> {
    let rows = table_rows()?;
    let mut results = Vec::new();
    let mut csv = vec![std::iter::once("row".to_string())
        .chain(csv_header_verdict())
        .collect::<Vec<_>>()];
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<18} {:<15} {:>3}  {:<22} {:<22} verdict",
        "row", "family", "e", "predicted (n, m, S)", "measured (n, m, S)"
    );
    let mut all_pass = true;
    for (label, d) in &rows {
        let (r, agree) = check_descriptor(d, ctx, &Expectations::default())?;
        all_pass &= r.verdict.is_pass();
        results.push(json!({
            "row": label,
            "family": d.family,
            "parameters": d.parameters,
            "e": d.generator,
            "predicted": { "n": d.predicted_n, "m": d.predicted_m, "S": d.predicted_s },
            "measured": { "n": r.measured_n, "m": r.measured_m, "S": r.measured_s },
            "direct_checked": agree.is_some(),
            "routes_agree": agree,
            "mismatches": r.mismatches,
            "verdict": r.verdict,
        }));
        let triple = |n: u64, m: u64, s: &[u64]| format!("({n}, {m}, {})", set_text(s));
        let _ = writeln!(
            text,
            "{:<18} {:<15} {:>3}  {:<22} {:<22} {}",
            label,
            d.family.as_str(),
            d.generator,
            triple(d.predicted_n, d.predicted_m, &d.predicted_s),
            triple(r.measured_n, r.measured_m, &r.measured_s),
            r.verdict
        );
        let mut row = vec![label.to_string()];
        row.extend(csv_row_verdict(d.family.as_str(), &r));
        csv.push(row);
    }

    Ok(Output {
        command: "table",
        inputs: ctx.inputs(json!({})),
        results: Value::Array(results),
        text,
        csv,
        exit_code: if all_pass { EXIT_OK } else { EXIT_FAIL },
    })
}
