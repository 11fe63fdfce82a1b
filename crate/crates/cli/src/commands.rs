use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qsc_core::coefficients::{
    matrix_to_json, ito_coefficients, CoefficientFamily, DampingConstant, FamilyDocument,
    ItoDocument, JsonMatrix,
};
use qsc_core::dyson::{
    self, kernel_moments, markov_scan_csv, pair_diagram_modulus_sum,
    pule_bound_gaussian, restricted_xi_sum, xi_bound, KernelSpec, ScaledKernel, StepFunction,
    DEFAULT_LAMBDAS,
};
use qsc_core::linalg::{self, fmt_sig, round_sig, CMatrix};
use qsc_core::oscillator::{self, Amplitude, MomentPolynomial, TruncatedOscillator};
use qsc_core::partitions::{
    self, bell, enumerate_pair_partitions, enumerate_set_partitions, pair_partition_count,
    stirling2_row, GoldstoneDiagram,
};
use qsc_core::toyfock::{self, SlotLattice, TransferMode};

use crate::config::{self, non_negative, pick, positive, KernelConfig, RunConfig, TabulatedKernel};
use crate::{
    BoundsArgs, CliError, CombinatoricsArgs, EvolveArgs, ItoCoeffsArgs, KernelArgs, MarkovScanArgs,
    MomentsArgs, Report, RenderArgs,
};

type Result<T> = std::result::Result<T, CliError>;

/// Largest `n` for counting without enumeration.
const MAX_COUNT_N: usize = 200;
/// Largest slot count accepted by `evolve`.
const MAX_SLOTS: usize = 1 << 22;
/// Accuracy of the per-piece matrix exponentials in the ODE reference.
const ODE_TOL: f64 = 1e-10;

fn format_choice(flag: &Option<String>, cfg: &RunConfig, default: &str, allowed: &[&str]) -> Result<String> {
    let f = pick(flag.clone(), cfg.format.clone(), default.to_string());
    if allowed.contains(&f.as_str()) {
        Ok(f)
    } else {
        Err(CliError::input(format!("unsupported format `{f}` (expected one of {})", allowed.join(", "))))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::input(format!("cannot serialise output: {e}")))
}

#[derive(Serialize)]
struct CombinatoricsDoc {
    n: usize,
    stirling2: Vec<String>,
    bell: String,
    pair_partitions: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumerated: Option<String>,
}

pub fn combinatorics(a: &CombinatoricsArgs, cfg: &RunConfig) -> Result<Report> {
    let n = a.n.or(cfg.n).ok_or_else(|| CliError::input("--n is required"))?;
    if n > MAX_COUNT_N {
        return Err(CliError::input(format!("n = {n} exceeds {MAX_COUNT_N}")));
    }
    let format = format_choice(&a.out.format, cfg, "text", &["text", "json"])?;
    let bell_n = bell(n);
    let mut ok = true;
    let enumerated = if a.enumerate {
        let count = enumerate_set_partitions(n)?.count();
        ok = count.to_string() == bell_n.to_string();
        Some(count.to_string())
    } else {
        None
    };
    let doc = CombinatoricsDoc {
        n,
        stirling2: stirling2_row(n).iter().map(|s| s.to_string()).collect(),
        bell: bell_n.to_string(),
        pair_partitions: pair_partition_count(n).to_string(),
        enumerated,
    };
    let body = if format == "json" {
        to_json(&doc)?
    } else {
        let mut s = format!(
            "n {}\nstirling2 {}\nbell {}\npair_partitions {}\n",
            doc.n,
            doc.stirling2.join(" "),
            doc.bell,
            doc.pair_partitions
        );
        if let Some(e) = &doc.enumerated {
            let _ = writeln!(s, "enumerated {e}");
        }
        s
    };
    Ok(Report::new(body, ok))
}

#[derive(Serialize)]
struct MomentsDoc {
    kind: String,
    n: usize,
    z: [f64; 2],
    closed_form_coefficients: Vec<String>,
    diagram_sum_matches: bool,
    value: f64,
    oracle: f64,
    oracle_dimension: usize,
    relative_deviation: f64,
}

fn polynomial_strings(p: &MomentPolynomial) -> Vec<String> {
    p.coeffs.iter().map(|c| c.to_string()).collect()
}

pub fn moments(a: &MomentsArgs, cfg: &RunConfig) -> Result<Report> {
    let n = a.n.or(cfg.n).ok_or_else(|| CliError::input("--n is required"))?;
    let z = Amplitude(a.z.unwrap_or(Complex64::new(1.0, 0.0)));
    let tol = positive("tolerance", pick(a.tolerance, cfg.tolerance, 1e-9))?;
    let format = format_choice(&a.out.format, cfg, "text", &["text", "json"])?;
    let (closed, diagrams, value, ladder_ops, observable): (_, _, _, _, fn(&TruncatedOscillator, Amplitude) -> CMatrix) =
        match a.kind.as_str() {
            "q" => (
                oscillator::moment_q_closed_form(n),
                oscillator::moment_q_diagram_sum(n)?,
                oscillator::moment_q(n, z)?,
                n,
                TruncatedOscillator::observable_q,
            ),
            "n" | "N" => (
                oscillator::moment_n_closed_form(n),
                oscillator::moment_n_diagram_sum(n)?,
                oscillator::moment_n(n, z)?,
                2 * n,
                TruncatedOscillator::observable_n,
            ),
            other => return Err(CliError::input(format!("unknown moment kind `{other}` (expected q or n)"))),
        };
    let dim = ladder_ops + 2;
    let osc = TruncatedOscillator::new(dim)?;
    let oracle = osc.vacuum_power(&observable(&osc, z), n);
    // relative deviation; absolute when the moment vanishes
    let gap = (oracle - Complex64::new(value, 0.0)).norm();
    let deviation = if value == 0.0 { gap } else { gap / value.abs() };
    let matches = closed == diagrams;
    let ok = matches && deviation <= tol;
    let doc = MomentsDoc {
        kind: a.kind.to_lowercase(),
        n,
        z: [round_sig(z.0.re), round_sig(z.0.im)],
        closed_form_coefficients: polynomial_strings(&closed),
        diagram_sum_matches: matches,
        value: round_sig(value),
        oracle: round_sig(oracle.re),
        oracle_dimension: dim,
        relative_deviation: round_sig(deviation),
    };
    let body = if format == "json" {
        to_json(&doc)?
    } else {
        format!(
            "kind {}\nn {}\nz {} {}\ncoefficients {}\ndiagram_sum_matches {}\nvalue {}\noracle {}\noracle_dimension {}\nrelative_deviation {}\n",
            doc.kind,
            n,
            fmt_sig(z.0.re),
            fmt_sig(z.0.im),
            doc.closed_form_coefficients.join(" "),
            matches,
            fmt_sig(value),
            fmt_sig(oracle.re),
            dim,
            fmt_sig(deviation)
        )
    };
    Ok(Report::new(body, ok))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = config::read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn ito_coeffs(a: &ItoCoeffsArgs, cfg: &RunConfig) -> Result<Report> {
    let input = a.input.clone().or(cfg.input.clone()).ok_or_else(|| CliError::input("--input is required"))?;
    let tol = positive("tolerance", pick(a.tolerance, cfg.tolerance, 1e-10))?;
    format_choice(&a.out.format, cfg, "json", &["json"])?;
    let family: FamilyDocument = read_json(&input)?;
    let (e, k) = family.to_family()?;
    let doc = ItoDocument::build(&e, &k)?;
    let mut report = Report::new(to_json(&doc)?, doc.unitarity_residual < tol);
    if doc.norm_condition_violated {
        report.warnings.push(format!(
            "||kappa E11|| = {} >= 1: the scattering series diverges",
            fmt_sig(doc.norm_kappa_e11)
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    breakpoints: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl StepDoc {
    fn to_step(&self) -> Result<StepFunction> {
        let values = self.values.iter().map(|v| Complex64::new(v[0], v[1])).collect();
        Ok(StepFunction::new(self.breakpoints.clone(), values)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolveDoc {
    family: FamilyDocument,
    f: Option<StepDoc>,
    g: Option<StepDoc>,
}

/// The one-dimensional family `E00 = E11 = 0`, `E01 = E10 = 1`, `kappa = 1/2`.
fn scalar_example() -> (CoefficientFamily, DampingConstant) {
    let one = CMatrix::from_element(1, 1, linalg::ONE);
    let zero = CMatrix::from_element(1, 1, linalg::ZERO);
    (
        CoefficientFamily::new(zero.clone(), one.clone(), one, zero).expect("Hermitian"),
        DampingConstant::new(Complex64::new(0.5, 0.0)).expect("positive damping"),
    )
}

#[derive(Serialize)]
struct MethodResult {
    method: &'static str,
    matrix: JsonMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<&'static str>,
    error_bound: f64,
}

#[derive(Serialize)]
struct Deviation {
    methods: [&'static str; 2],
    deviation: f64,
    bound: f64,
    within: bool,
}

#[derive(Serialize)]
struct EvolveReport {
    t: f64,
    d: usize,
    normalization: [f64; 2],
    results: Vec<MethodResult>,
    deviations: Vec<Deviation>,
    within_bounds: bool,
}

pub fn evolve(a: &EvolveArgs, cfg: &RunConfig) -> Result<Report> {
    format_choice(&a.out.format, cfg, "json", &["json"])?;
    let t = non_negative("t", pick(a.t, cfg.t, 1.0))?;
    let n_max = pick(a.n_max, cfg.n_max, 12);
    let slots = pick(a.slots, cfg.slots, 1024);
    if slots == 0 || slots > MAX_SLOTS {
        return Err(CliError::input(format!("slots must lie in 1..={MAX_SLOTS}")));
    }
    let mode = match a.toyfock_mode.as_str() {
        "first-order" => TransferMode::FirstOrder,
        "exponential" => TransferMode::Exponential,
        other => return Err(CliError::input(format!("unknown toyfock mode `{other}`"))),
    };
    let requested: Vec<String> = if a.methods.is_empty() {
        cfg.methods.clone().unwrap_or_else(|| vec!["series".into(), "ode".into(), "toyfock".into()])
    } else {
        a.methods.clone()
    };
    let mut methods = [false; 3];
    for m in &requested {
        match m.trim() {
            "series" => methods[0] = true,
            "ode" => methods[1] = true,
            "toyfock" => methods[2] = true,
            other => return Err(CliError::input(format!("unknown method `{other}` (expected series, ode, toyfock)"))),
        }
    }

    let (family, kappa, f_doc, g_doc) = match a.input.clone().or(cfg.input.clone()) {
        Some(path) => {
            let doc: EvolveDoc = read_json(&path)?;
            let (e, k) = doc.family.to_family()?;
            (e, k, doc.f, doc.g)
        }
        None => {
            let (e, k) = scalar_example();
            (e, k, None, None)
        }
    };
    let l = ito_coefficients(&family, &kappa)?;
    let step = |doc: Option<StepDoc>| -> Result<StepFunction> {
        match doc {
            Some(d) if !a.vacuum => d.to_step(),
            _ => Ok(StepFunction::zero(t.max(f64::MIN_POSITIVE))?),
        }
    };
    let f = step(f_doc)?;
    let g = step(g_doc)?;

    let mut results: Vec<(MethodResult, CMatrix)> = Vec::new();
    if methods[0] {
        let s = dyson::series_matrix_element(&l, &f, &g, t, n_max)?;
        results.push((
            MethodResult {
                method: "series",
                matrix: matrix_to_json(&s.value),
                n_max: Some(n_max),
                slots: None,
                dt: None,
                mode: None,
                error_bound: round_sig(s.tail_bound),
            },
            s.value,
        ));
    }
    if methods[1] {
        let m = dyson::ode_matrix_element(&l, &f, &g, t)?;
        results.push((
            MethodResult {
                method: "ode",
                matrix: matrix_to_json(&m),
                n_max: None,
                slots: None,
                dt: None,
                mode: None,
                error_bound: ODE_TOL,
            },
            m,
        ));
    }
    if methods[2] {
        if t == 0.0 {
            return Err(CliError::input("toyfock needs t > 0"));
        }
        let lattice = SlotLattice::new(t, slots)?;
        let r = toyfock::coherent_matrix_element(&l, &f, &g, &lattice, mode)?;
        let bound = match mode {
            TransferMode::FirstOrder => toyfock::first_order_error_bound(&l, &f, &g, &lattice),
            TransferMode::Exponential => ODE_TOL,
        };
        results.push((
            MethodResult {
                method: "toyfock",
                matrix: matrix_to_json(&r.matrix),
                n_max: None,
                slots: Some(slots),
                dt: Some(round_sig(r.dt)),
                mode: Some(match mode {
                    TransferMode::FirstOrder => "first-order",
                    TransferMode::Exponential => "exponential",
                }),
                error_bound: round_sig(bound),
            },
            r.matrix,
        ));
    }

    let mut deviations = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let deviation = linalg::spectral_norm(&(&results[i].1 - &results[j].1));
            let bound = results[i].0.error_bound + results[j].0.error_bound;
            deviations.push(Deviation {
                methods: [results[i].0.method, results[j].0.method],
                deviation: round_sig(deviation),
                bound: round_sig(bound),
                within: deviation <= bound,
            });
        }
    }
    let within_bounds = deviations.iter().all(|d| d.within);
    let normalization = dyson::overlap_exponent(&f, &g, t).exp();
    let doc = EvolveReport {
        t,
        d: l.dim(),
        normalization: [round_sig(normalization.re), round_sig(normalization.im)],
        results: results.into_iter().map(|(r, _)| r).collect(),
        deviations,
        within_bounds,
    };
    Ok(Report::new(to_json(&doc)?, within_bounds))
}

fn kernel(a: &KernelArgs, cfg: &RunConfig) -> Result<KernelSpec> {
    let tabulated = |t: &TabulatedKernel| -> Result<KernelSpec> {
        let values = t.values.iter().map(|v| Complex64::new(v[0], v[1])).collect();
        Ok(KernelSpec::tabulated(t.grid.clone(), values)?)
    };
    if let Some(path) = &a.kernel_file {
        if a.amplitude.is_some() || a.tau.is_some() || a.omega.is_some() {
            return Err(CliError::input("--kernel-file cannot be combined with exponential kernel flags"));
        }
        let t: TabulatedKernel = read_json(path)?;
        return tabulated(&t);
    }
    let base = match &cfg.kernel {
        Some(KernelConfig::Tabulated(t)) if a.amplitude.is_none() && a.tau.is_none() && a.omega.is_none() => {
            return tabulated(t)
        }
        Some(KernelConfig::Exponential(e)) => (e.amplitude, e.tau, e.omega),
        _ => (0.5, 1.0, 0.0),
    };
    Ok(KernelSpec::exponential(
        a.amplitude.unwrap_or(base.0),
        a.tau.unwrap_or(base.1),
        a.omega.unwrap_or(base.2),
    )?)
}

fn lambda_grid(flag: &Option<Vec<f64>>, cfg: &RunConfig) -> Result<Vec<f64>> {
    let lambdas = pick(flag.clone(), cfg.lambdas.clone(), DEFAULT_LAMBDAS.to_vec());
    if lambdas.is_empty() {
        return Err(CliError::input("lambda grid is empty"));
    }
    for &l in &lambdas {
        positive("lambda", l)?;
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::input("lambda grid must be strictly decreasing"));
    }
    Ok(lambdas)
}

#[derive(Serialize)]
struct ScanRowDoc {
    diagram: String,
    lambda: f64,
    abs_integral: f64,
    re_integral: f64,
    im_integral: f64,
    limit_prediction: f64,
    slope_estimate: Option<f64>,
}

pub fn markov_scan(a: &MarkovScanArgs, cfg: &RunConfig) -> Result<Report> {
    let format = format_choice(&a.out.format, cfg, "csv", &["csv", "json"])?;
    let k = kernel(&a.kernel, cfg)?;
    let t = non_negative("t", pick(a.t, cfg.t, 1.0))?;
    let lambdas = lambda_grid(&a.lambdas, cfg)?;
    let mut diagrams: Vec<GoldstoneDiagram> = Vec::new();
    for s in &a.diagrams {
        diagrams.push(s.parse()?);
    }
    if let Some(n) = a.all_pairs {
        if n > dyson::MAX_SCAN_VERTICES {
            return Err(CliError::input(format!(
                "--all-pairs {n} exceeds the scan limit of {} vertices",
                dyson::MAX_SCAN_VERTICES
            )));
        }
        diagrams.extend(enumerate_pair_partitions(n)?);
    }
    if diagrams.is_empty() {
        return Err(CliError::input("no diagrams given (use --diagram or --all-pairs)"));
    }
    let rows = dyson::markov_scan(&k, &diagrams, &lambdas, t)?;
    let body = if format == "json" {
        let docs: Vec<ScanRowDoc> = rows
            .iter()
            .map(|r| ScanRowDoc {
                diagram: r.diagram.clone(),
                lambda: round_sig(r.lambda),
                abs_integral: round_sig(r.integral.norm()),
                re_integral: round_sig(r.integral.re),
                im_integral: round_sig(r.integral.im),
                limit_prediction: round_sig(r.limit_prediction.norm()),
                slope_estimate: r.slope_estimate.map(round_sig),
            })
            .collect();
        to_json(&docs)?
    } else {
        markov_scan_csv(&rows)
    };
    Ok(Report::new(body, true))
}

#[derive(Serialize)]
struct PuleRow {
    n: usize,
    lambda: f64,
    t: f64,
    measured: f64,
    bound: f64,
    pass: bool,
}

#[derive(Serialize)]
struct XiRow {
    n: usize,
    partial_sum: f64,
    pass: bool,
}

#[derive(Serialize)]
struct BoundsDoc {
    kappa_abs: f64,
    pule: Vec<PuleRow>,
    xi_a: f64,
    xi_b: f64,
    xi: f64,
    xi_partial_sums: Vec<XiRow>,
    all_pass: bool,
}

pub fn bounds(a: &BoundsArgs, cfg: &RunConfig) -> Result<Report> {
    let format = format_choice(&a.out.format, cfg, "text", &["text", "json"])?;
    let max_n = pick(a.max_n, cfg.n, 6);
    if max_n % 2 == 1 || max_n > 6 {
        return Err(CliError::input(format!("--max-n must be even and at most 6, got {max_n}")));
    }
    let k = kernel(&a.kernel, cfg)?;
    let lambdas = lambda_grid(&a.lambdas, cfg)?;
    let times = pick(a.times.clone(), cfg.times.clone(), vec![0.5, 1.0, 2.0]);
    for &t in &times {
        non_negative("t", t)?;
    }
    let xi_a = a.xi_a.unwrap_or(0.5f64.ln());
    let xi_b = a.xi_b.unwrap_or(0.0);
    if xi_a.is_nan() || !xi_b.is_finite() {
        return Err(CliError::input("Xi parameters must be finite"));
    }
    let xi = xi_bound(xi_a, xi_b)?;

    let kappa_abs = kernel_moments(&k.modulus())?.1.re;
    let mut pule = Vec::new();
    for n in (0..=max_n).step_by(2) {
        for &lambda in &lambdas {
            for &t in &times {
                let scaled = ScaledKernel::new(k.clone(), lambda)?;
                let measured = pair_diagram_modulus_sum(n, &scaled, t)?;
                let bound = pule_bound_gaussian(n / 2, kappa_abs, t);
                pule.push(PuleRow {
                    n,
                    lambda: round_sig(lambda),
                    t: round_sig(t),
                    measured: round_sig(measured),
                    bound: round_sig(bound),
                    pass: measured <= bound * (1.0 + 1e-12),
                });
            }
        }
    }
    let mut partial = 0.0;
    let mut xi_rows = Vec::new();
    for n in 0..=max_n {
        partial += restricted_xi_sum(xi_a, xi_b, n);
        xi_rows.push(XiRow {
            n,
            partial_sum: round_sig(partial),
            pass: partial <= xi * (1.0 + 1e-12),
        });
    }
    let all_pass = pule.iter().all(|r| r.pass) && xi_rows.iter().all(|r| r.pass);
    let doc = BoundsDoc {
        kappa_abs: round_sig(kappa_abs),
        pule,
        xi_a: round_sig(xi_a),
        xi_b: round_sig(xi_b),
        xi: round_sig(xi),
        xi_partial_sums: xi_rows,
        all_pass,
    };
    let body = if format == "json" {
        to_json(&doc)?
    } else {
        let mut s = format!("kappa_abs {}\n", fmt_sig(doc.kappa_abs));
        for r in &doc.pule {
            let _ = writeln!(
                s,
                "pule n={} lambda={} t={} measured={} bound={} {}",
                r.n,
                fmt_sig(r.lambda),
                fmt_sig(r.t),
                fmt_sig(r.measured),
                fmt_sig(r.bound),
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "xi A={} B={} value={}", fmt_sig(doc.xi_a), fmt_sig(doc.xi_b), fmt_sig(doc.xi));
        for r in &doc.xi_partial_sums {
            let _ = writeln!(
                s,
                "xi_partial n={} sum={} {}",
                r.n,
                fmt_sig(r.partial_sum),
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "all_pass {all_pass}");
        s
    };
    Ok(Report::new(body, all_pass))
}

pub fn render(a: &RenderArgs, cfg: &RunConfig) -> Result<Report> {
    let format = format_choice(&a.out.format, cfg, "text", &["text", "svg"])?;
    let d: GoldstoneDiagram = a.diagram.parse()?;
    Ok(Report::new(partitions::render_diagram(&d, &format)?, true))
}
