//! `crtool`: tables, convergence series, and verification reports for
//! Cohen-Ramanujan sums and expansions, emitted as CSV or JSON.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad usage.

mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use cohen_ramanujan::arith;
use cohen_ramanujan::crsum::{self, CRQuery, CrOracle};
use cohen_ramanujan::expansion::{
    self, AdditiveFunctionSpec, CoefficientFamily, DEFAULT_EXPANSION_TERMS,
    DEFAULT_EXPONENT_LIMIT, DEFAULT_MU_TERMS, DEFAULT_PRIME_LIMIT,
};
use cohen_ramanujan::rational::{parse_rational, to_f64};
use cohen_ramanujan::selftest;

use output::{
    fmt_bool, fmt_f64, fmt_int, fmt_rational_decimal, fmt_rational_pq, Format,
    OutputRecord,
};

/// Hard ceiling on table work (r_max * n_max) and on the oracle modulus.
const TABLE_CELL_LIMIT: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "crtool", version, about = "Cohen-Ramanujan sums, expansions, and verification reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Tau,
    Sigma,
    AdditiveOmega,
    CustomFile,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one Cohen-Ramanujan sum c_r^s(n) exactly.
    Crsum {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        n: i64,
        /// Also evaluate the defining exponential sum and report the
        /// discrepancy (refused when r^s > 10^7).
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Emit the matrix c_r^s(n) for r <= r-max, n <= n-max, with a
    /// summatory identity check per column.
    Table {
        #[arg(long)]
        s: u32,
        #[arg(long = "r-max")]
        r_max: u64,
        #[arg(long = "n-max")]
        n_max: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evaluate a truncated expansion at checkpoints and report the
    /// discrepancy from the closed-form target and the tail bound.
    Expand {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long, default_value_t = 2)]
        s: u32,
        /// Power parameter k (sigma family only).
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        a: u64,
        #[arg(long = "R", default_value_t = DEFAULT_EXPANSION_TERMS)]
        terms: u64,
        /// Coefficient file for --family custom-file: a JSON object
        /// mapping r (integer string) to "p/q" rational strings.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long = "p-max", default_value_t = DEFAULT_PRIME_LIMIT)]
        p_max: u64,
        #[arg(long = "v-max", default_value_t = DEFAULT_EXPONENT_LIMIT)]
        v_max: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Cross-check both directions of the expansion duality
    /// (ĝ -> γ -> ĝ and the divisor-sum identity).
    Dual {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long = "a-max", default_value_t = 20)]
        a_max: u64,
        #[arg(long = "R", default_value_t = DEFAULT_EXPANSION_TERMS)]
        terms: u64,
        #[arg(long = "M", default_value_t = DEFAULT_MU_TERMS)]
        mu_terms: u64,
        #[arg(long = "p-max", default_value_t = DEFAULT_PRIME_LIMIT)]
        p_max: u64,
        #[arg(long = "v-max", default_value_t = DEFAULT_EXPONENT_LIMIT)]
        v_max: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Construct the expansion coefficients of the additive function ω
    /// and emit them with the truncation metadata.
    Additive {
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long = "p-max", default_value_t = DEFAULT_PRIME_LIMIT)]
        p_max: u64,
        #[arg(long = "v-max", default_value_t = DEFAULT_EXPONENT_LIMIT)]
        v_max: u32,
        /// Largest r to list coefficients for.
        #[arg(long = "r-max", default_value_t = 100)]
        r_max: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run the full invariant suite; exit 0 iff everything passes.
    Selftest {
        /// Restrict ranges so the run finishes in seconds.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Crsum { r, s, n, oracle, format } => cmd_crsum(r, s, n, oracle, format),
        Command::Table { s, r_max, n_max, format } => cmd_table(s, r_max, n_max, format),
        Command::Expand { family, s, k, a, terms, file, p_max, v_max, format } => {
            cmd_expand(family, s, k, a, terms, file, p_max, v_max, format)
        }
        Command::Dual {
            family, s, k, file, a_max, terms, mu_terms, p_max, v_max, format,
        } => cmd_dual(family, s, k, file, a_max, terms, mu_terms, p_max, v_max, format),
        Command::Additive { s, p_max, v_max, r_max, format } => {
            cmd_additive(s, p_max, v_max, r_max, format)
        }
        Command::Selftest { quick } => cmd_selftest(quick),
    }
}

fn lib<T>(result: cohen_ramanujan::Result<T>) -> Result<T, String> {
    result.map_err(|e| e.to_string())
}

fn cmd_crsum(r: u64, s: u32, n: i64, oracle: bool, format: Format) -> Result<ExitCode, String> {
    let query = lib(CRQuery::new(r, s, n))?;
    let exact = lib(crsum::cr_sum(&query))?;

    let mut record = OutputRecord::new("crsum");
    record.param("r", r);
    record.param("s", s);
    record.param("n", n);
    record.param("oracle", oracle);

    if oracle {
        let eval = lib(lib(CrOracle::new(r, s))?.eval(n, 1e-6))?;
        let discrepancy = eval.real - exact.to_string().parse::<f64>().unwrap_or(f64::NAN);
        record.columns = ["r", "s", "n", "value", "oracle_real", "oracle_imag", "discrepancy"]
            .iter().map(|c| c.to_string()).collect();
        record.rows.push(vec![
            r.to_string(),
            s.to_string(),
            n.to_string(),
            fmt_int(&exact),
            fmt_f64(eval.real),
            fmt_f64(eval.imag),
            fmt_f64(discrepancy),
        ]);
    } else {
        record.columns = ["r", "s", "n", "value"].iter().map(|c| c.to_string()).collect();
        record.rows.push(vec![
            r.to_string(),
            s.to_string(),
            n.to_string(),
            fmt_int(&exact),
        ]);
    }
    record.print(format);
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(s: u32, r_max: u64, n_max: u64, format: Format) -> Result<ExitCode, String> {
    if r_max == 0 || n_max == 0 {
        return Err("r-max and n-max must be positive".to_string());
    }
    if r_max.saturating_mul(n_max) > TABLE_CELL_LIMIT {
        return Err(format!(
            "range guard: r-max * n-max = {} exceeds {TABLE_CELL_LIMIT}",
            r_max.saturating_mul(n_max)
        ));
    }

    let mut record = OutputRecord::new("table");
    record.param("s", s);
    record.param("r_max", r_max);
    record.param("n_max", n_max);
    record.columns = std::iter::once("r".to_string())
        .chain((1..=n_max).map(|n| format!("n={n}")))
        .collect();

    // column-major evaluation via the batch sieve
    let mut columns = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        columns.push(lib(crsum::cr_sum_batch(n, s, r_max))?);
    }
    for r in 1..=r_max {
        let mut row = vec![r.to_string()];
        for column in &columns {
            row.push(fmt_int(&column[r as usize - 1]));
        }
        record.rows.push(row);
    }

    // per-column summatory identity at q = r_max
    let mut identity_row = vec![format!("identity_q={r_max}")];
    let divisors = lib(arith::divisors(r_max))?;
    for (idx, column) in columns.iter().enumerate() {
        let n = idx as u64 + 1;
        let lhs: BigInt = divisors.iter().map(|&d| column[d as usize - 1].clone()).sum();
        let rhs = lib(arith::xi(r_max, n, s))?;
        identity_row.push(fmt_bool(lhs == rhs));
    }
    record.rows.push(identity_row);

    record.print(format);
    Ok(ExitCode::SUCCESS)
}

fn load_custom_family(s: u32, file: Option<&PathBuf>) -> Result<CoefficientFamily, String> {
    let path = file.ok_or("--family custom-file requires --file <path>")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let parsed: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
    let object = parsed
        .as_object()
        .ok_or("coefficient file must be a JSON object of r -> \"p/q\"")?;
    let mut table = BTreeMap::new();
    for (key, value) in object {
        let r: u64 = key
            .parse()
            .map_err(|_| format!("bad index {key:?}: expected a positive integer"))?;
        let text = value
            .as_str()
            .ok_or_else(|| format!("coefficient for r={r} must be a \"p/q\" string"))?;
        let coeff = parse_rational(text)
            .ok_or_else(|| format!("bad rational {text:?} for r={r}"))?;
        table.insert(r, coeff);
    }
    lib(CoefficientFamily::custom(s, table))
}

fn build_family(
    kind: FamilyKind,
    s: u32,
    k: u32,
    file: Option<&PathBuf>,
    p_max: u64,
    v_max: u32,
) -> Result<CoefficientFamily, String> {
    let fam = match kind {
        FamilyKind::Tau => CoefficientFamily::TauS { s },
        FamilyKind::Sigma => CoefficientFamily::SigmaKS { k, s },
        FamilyKind::AdditiveOmega => lib(expansion::additive_coefficients(
            &AdditiveFunctionSpec::omega(p_max, v_max),
            s,
        ))?,
        FamilyKind::CustomFile => load_custom_family(s, file)?,
    };
    lib(fam.validate())?;
    Ok(fam)
}

fn expansion_target(
    kind: FamilyKind,
    fam: &CoefficientFamily,
    s: u32,
    k: u32,
    a: u64,
) -> Result<Option<BigRational>, String> {
    Ok(match kind {
        FamilyKind::Tau => Some(BigRational::from_integer(BigInt::from(lib(
            arith::tau_s(a, s),
        )?))),
        FamilyKind::Sigma => Some(BigRational::new(
            lib(arith::sigma_k(a, k * s))?,
            BigInt::from(a).pow(k * s),
        )),
        FamilyKind::AdditiveOmega => {
            let _ = fam;
            Some(BigRational::from_integer(BigInt::from(lib(arith::omega(a))?)))
        }
        FamilyKind::CustomFile => None,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_expand(
    kind: FamilyKind,
    s: u32,
    k: u32,
    a: u64,
    terms: u64,
    file: Option<PathBuf>,
    p_max: u64,
    v_max: u32,
    format: Format,
) -> Result<ExitCode, String> {
    let fam = build_family(kind, s, k, file.as_ref(), p_max, v_max)?;
    let target = expansion_target(kind, &fam, s, k, a)?;

    let mut checkpoints: Vec<u64> = [10, 100, 1000, terms]
        .into_iter()
        .filter(|&c| c <= terms)
        .collect();
    checkpoints.dedup();

    let mut record = OutputRecord::new("expand");
    record.param("family", format!("{kind:?}").to_lowercase());
    record.param("s", s);
    if kind == FamilyKind::Sigma {
        record.param("k", k);
    }
    if kind == FamilyKind::AdditiveOmega {
        record.param("p_max", p_max);
        record.param("v_max", v_max);
    }
    record.param("a", a);
    record.param("R", terms);
    if let Some(t) = &target {
        record.param("target", fmt_rational_decimal(t));
    }
    record.columns = [
        "terms", "exact_core_pq", "value", "discrepancy", "tail_bound",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();

    for checkpoint in checkpoints {
        let result = lib(expansion::eval_expansion(&fam, a, checkpoint))?;
        let discrepancy = target
            .as_ref()
            .map(|t| fmt_f64((result.value - to_f64(t)).abs()))
            .unwrap_or_default();
        record.rows.push(vec![
            checkpoint.to_string(),
            fmt_rational_pq(&result.exact_core),
            fmt_f64(result.value),
            discrepancy,
            fmt_f64(result.tail_bound),
        ]);
    }
    record.print(format);
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_dual(
    kind: FamilyKind,
    s: u32,
    k: u32,
    file: Option<PathBuf>,
    a_max: u64,
    terms: u64,
    mu_terms: u64,
    p_max: u64,
    v_max: u32,
    format: Format,
) -> Result<ExitCode, String> {
    let fam = build_family(kind, s, k, file.as_ref(), p_max, v_max)?;
    let report = lib(expansion::verify_equivalence(&fam, a_max, terms, mu_terms))?;

    // round-trip recovery ĝ(a) from γ, exact on finite supports
    let recovery_limit = fam
        .support_bound()
        .map(|b| b * b)
        .unwrap_or(a_max * 40)
        .max(a_max);
    let gamma_terms = fam.support_bound().map(|b| b.max(1)).unwrap_or(mu_terms.min(500));

    let mut record = OutputRecord::new("dual");
    record.param("family", format!("{kind:?}").to_lowercase());
    record.param("s", fam.s());
    if kind == FamilyKind::Sigma {
        record.param("k", k);
    }
    record.param("a_max", a_max);
    record.param("R", terms);
    record.param("M", mu_terms);
    record.param("max_discrepancy", fmt_f64(report.max_discrepancy));
    record.param("all_within_bounds", fmt_bool(report.all_within_bounds));
    record.param("exact_everywhere", fmt_bool(report.exact_everywhere));
    record.columns = [
        "a", "gamma_pq", "gamma_tail", "recovered_ghat_pq", "ghat_pq",
        "direct", "via_gamma", "discrepancy", "direct_tail", "gamma_sum_tail", "exact",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();

    for row in &report.rows {
        let a = row.a;
        let gamma = lib(expansion::gamma_from_ghat(&fam, a, mu_terms))?;
        let recovered = lib(expansion::ghat_from_gamma(
            |x| {
                expansion::gamma_from_ghat(&fam, x, gamma_terms)
                    .map(|t| t.value)
                    .unwrap_or_default()
            },
            a,
            recovery_limit,
            fam.s(),
        ))?;
        let ghat = lib(fam.coefficient(a))?;
        record.rows.push(vec![
            a.to_string(),
            fmt_rational_pq(&gamma.value),
            fmt_f64(gamma.tail_bound),
            fmt_rational_pq(&recovered),
            fmt_rational_pq(&ghat),
            fmt_f64(row.direct),
            fmt_f64(row.via_gamma),
            fmt_f64(row.discrepancy),
            fmt_f64(row.direct_tail),
            fmt_f64(row.gamma_tail),
            fmt_bool(row.exact),
        ]);
    }
    record.print(format);
    Ok(ExitCode::SUCCESS)
}

fn cmd_additive(
    s: u32,
    p_max: u64,
    v_max: u32,
    r_max: u64,
    format: Format,
) -> Result<ExitCode, String> {
    let fam = lib(expansion::additive_coefficients(
        &AdditiveFunctionSpec::omega(p_max, v_max),
        s,
    ))?;
    let truncation_error = match &fam {
        CoefficientFamily::Additive(f) => f.truncation_error,
        _ => unreachable!(),
    };

    let mut record = OutputRecord::new("additive");
    record.param("function", "omega");
    record.param("s", s);
    record.param("p_max", p_max);
    record.param("v_max", v_max);
    record.param("truncation_error", fmt_f64(truncation_error));
    record.columns = ["r", "ghat_pq", "ghat_decimal"]
        .iter()
        .map(|c| c.to_string())
        .collect();

    for r in 1..=r_max {
        let c = lib(fam.coefficient(r))?;
        if r == 1 || !c.is_zero() || lib(arith::factor(r))?.distinct_primes() == 1 {
            record.rows.push(vec![
                r.to_string(),
                fmt_rational_pq(&c),
                fmt_rational_decimal(&c),
            ]);
        }
    }
    record.print(format);
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(quick: bool) -> Result<ExitCode, String> {
    let results = lib(selftest::run(selftest::SelftestConfig { quick }))?;
    for r in &results {
        let status = if r.passed { "ok  " } else { "FAIL" };
        println!("{status} {} - {}", r.name, r.detail);
    }
    if selftest::all_passed(&results) {
        println!("selftest: all {} checks passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let first = results.iter().find(|r| !r.passed).unwrap();
        eprintln!("selftest failed at {}: {}", first.name, first.detail);
        Ok(ExitCode::from(1))
    }
}
